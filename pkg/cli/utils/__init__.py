"""
CLI utilities: object builders and report export
"""
