"""
Persistência: banco de códigos e arquivos de entrada/saída.
"""
