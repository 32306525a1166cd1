from modml.cli import entry

entry()
