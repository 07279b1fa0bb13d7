"""
Núcleo matemático: corpos finitos, tipos, códigos CSS, expoentes, protocolo e oráculos.
"""
