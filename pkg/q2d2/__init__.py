"""Two-dimensional geometric quantization of latent feature pairs."""
