"""Modal ML: a stratified module calculus with a first-class package modality."""

__version__ = "0.1.0"
