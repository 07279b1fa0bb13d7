"""
Modelos de ataque (canais de Pauli de um dígito).
"""
