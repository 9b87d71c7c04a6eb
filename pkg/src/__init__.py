"""SAR / multispectral pseudo-color fusion via coupled dictionary learning."""
__version__ = "0.1.0"
