"""TriAD Detector - Detección de anomalías tri-dominio en series temporales."""

__version__ = "0.2.0"
__author__ = "TriAD Detector"
