"""
cssqkd - bancada de códigos CSS e distribuição quântica de chaves.
"""
