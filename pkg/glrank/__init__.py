"""
glrank - exact tensor ranks and transvection character ratios

glrank computes dimensions, tensor ranks and character ratios at a
transvection for irreducible representations of GL_n(F_q) and SL_n(F_q),
implements the eta correspondence, checks everything against exact
character tables of small groups and analyses the transvection random walk.
"""

from .core.config import Caps, RunConfig
from .core.store import ArtifactStore
from .partitions import Partition, pieri_expand, transition_matrix
from .qseries import QPoly, gauss_binomial
from .sps import sps_rep, cr_sps, fixed_flags
from .pcf import PcfIrrep, dim, char_at_T, cr_at_T, eta, enumerate_irreps, tensor_rank
from .matgroup import GroupKind, MatrixFq, enumerate_group, get_field
from .chartab import load_character_table, rank_report, restrict_to_sl
from .walk import exact_convolution, fourier_distribution, mixing_report, mc_walk
from .operations import ArtifactBatch

__version__ = "0.1.0"
__all__ = [
    'Caps',
    'RunConfig',
    'ArtifactStore',
    'ArtifactBatch',
    'Partition',
    'pieri_expand',
    'transition_matrix',
    'QPoly',
    'gauss_binomial',
    'sps_rep',
    'cr_sps',
    'fixed_flags',
    'PcfIrrep',
    'dim',
    'char_at_T',
    'cr_at_T',
    'eta',
    'enumerate_irreps',
    'tensor_rank',
    'GroupKind',
    'MatrixFq',
    'enumerate_group',
    'get_field',
    'load_character_table',
    'rank_report',
    'restrict_to_sl',
    'exact_convolution',
    'fourier_distribution',
    'mixing_report',
    'mc_walk',
]
