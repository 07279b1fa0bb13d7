"""
Interface de linha de comando e esquemas dos artefatos.
"""
