"""Low-discrepancy and IID point generators."""
from ._types import ORIGIN_WARNING, PointBlock, Randomization, UnrandomizedWarning
from .digital import DigitalNet, digital_net_points, linear_matrix_scramble
from .group import digitwise_add, digitwise_sub, lattice_add, lattice_sub
from .halton import PRIMES, Halton, halton_points
from .iid import IIDGenerator, iid_points
from .io import (
    GeneratingMatrices,
    LatticeGenVector,
    data_dir,
    default_lattice_vector,
    default_sobol_matrices,
    parse_direction_numbers,
    parse_lattice_vector,
)
from .lattice import Lattice, bit_reverse, lattice_points


def make_generator(family, d, seed=None, randomize=None, ordering=None, gen_file=None):
    """Build a generator by family name, with that family's default randomization."""
    from ..errors import UsageError

    if family == "lattice":
        gen = parse_lattice_vector(gen_file) if gen_file else None
        return Lattice(d, gen, ordering or "natural", randomize or "shift_mod1", seed)
    if family == "net":
        mats = parse_direction_numbers(gen_file, d=d) if gen_file else None
        return DigitalNet(d, mats, ordering or "standard", randomize or "lms_with_digital_shift", seed)
    if family == "halton":
        return Halton(d, randomize or "digit_shift", seed)
    if family == "iid":
        return IIDGenerator(d, seed)
    raise UsageError(f"unknown sampler family {family!r}")


__all__ = [
    "DigitalNet", "GeneratingMatrices", "Halton", "IIDGenerator", "Lattice", "LatticeGenVector",
    "ORIGIN_WARNING", "PRIMES", "PointBlock", "Randomization", "UnrandomizedWarning", "bit_reverse",
    "data_dir", "default_lattice_vector", "default_sobol_matrices", "digital_net_points",
    "digitwise_add", "digitwise_sub", "halton_points", "iid_points", "lattice_add", "lattice_points",
    "lattice_sub", "linear_matrix_scramble", "make_generator", "parse_direction_numbers",
    "parse_lattice_vector",
]
