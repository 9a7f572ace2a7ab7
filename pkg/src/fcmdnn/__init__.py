"""Pipeline NN / DNN / FCM-DNN para diagnóstico binario sobre imágenes en escala de grises."""

__version__ = "0.1.0"
