"""Financial distress classification: soft-margin kernel SVM (SMO) and a momentum BPN."""

__version__ = "0.1.0"
