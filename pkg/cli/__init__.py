"""
harnack-lab command line
========================

Entry point: python -m cli.main <command> --config run.json
"""
