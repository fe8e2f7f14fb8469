"""specxai: spectrogram classification with class-activation-map explanations."""

__version__ = "0.1.0"
