"""Rate-2 4x2 space-time block code, its real lattice formulation, and
three exact maximum-likelihood decoders with visited-node accounting."""

from ._accel import NUMBA_ENABLED
from .constellation import (PamConstellation, QamConstellation, bits_to_symbols,
                            make_qam, se_order, slice_pam, symbols_to_bits)
from .stbc import encode, generator_matrix, realify_matrix, realize, unrealize, weight_matrices
from .channel import NoiseConfig, draw_channel, equivalent_channel, transmit
from .structured_qr import (QrFactors, R23Factors, SingularChannelError,
                            StructureReport, gram_schmidt_qr, qr_r23, verify_structure)
from .decoders import (DecodeResult, NodeStats, conditional_pam_search,
                       conditional_pam_search_joint, ml_bruteforce,
                       simplified_ml_decode, sphere_decode_se)
from .harness import ResultRow, SimConfig, run_sweep, run_trial, verify_structure_cmd

__version__ = "0.1.0"
