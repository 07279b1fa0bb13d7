"""
Infraestrutura de apoio (fluxos aleatórios).
"""
