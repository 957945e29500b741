"""Group operations on [0,1)^d: mod-1 addition (lattices) and digitwise XOR (digital nets)."""
import numpy as np


def lattice_add(x, y):
    return np.mod(np.asarray(x, dtype=np.float64) + np.asarray(y, dtype=np.float64), 1.0)


def lattice_sub(x, y):
    return np.mod(np.asarray(x, dtype=np.float64) - np.asarray(y, dtype=np.float64), 1.0)


def digitwise_add(x, y, precision=53):
    """XOR the first ``precision`` binary digits of each coordinate."""
    if not 1 <= precision <= 53:
        raise ValueError("precision must be between 1 and 53 bits")
    scale = 2.0**precision
    a = np.floor(np.asarray(x, dtype=np.float64) * scale).astype(np.uint64)
    b = np.floor(np.asarray(y, dtype=np.float64) * scale).astype(np.uint64)
    return (a ^ b).astype(np.float64) / scale


# XOR is its own inverse
digitwise_sub = digitwise_add
