"""Concatenated nested-lattice codes for AWGN and compute-and-forward channels."""

from .channel import ChannelSpec, awgn, gaussian_mac, sigma2_from_snr, stream
from .compute_forward import (CFSystem, build_cf_system, cf_alpha, cf_decode, cf_encode_all, cf_rate,
                              combine_symbols, estimate_relay_pe, lattice_combination_label)
from .concat import (ConcatCode, ExpanderPlan, RSPlan, build_expander_concat, build_rs_concat, concat_decode,
                     concat_encode, plan_expander, plan_rs)
from .exceptions import *  # noqa: F401,F403
from .expander import (BipartiteGraph, ExpanderCode, expander_build, expander_encode, random_regular_bipartite,
                       second_eigenvalue, zemor_decode)
from .galois import (ExtField, PrimeField, build_ext_field, digits_to_symbol, field_arith, symbol_to_digits,
                     symbol_to_vec, vec_to_symbol)
from .harness import ResultRecord, config_hash, load_config, run_experiment, validate_config
from .inner import (ErrorEstimate, InnerCodec, build_inner_codec, decode_inner, encode_inner,
                    estimate_inner_pe)
from .lattice import (ConstructionALattice, NestedLatticePair, build_nested_pair, closest_point, coset_to_label,
                      covering_radius, dither_sample, label_to_coset, mod_lattice)
from .linear_code import LinearCode, code_from_generator, encode, random_code, trivial_code
from .reed_solomon import RSCode, rs_build, rs_decode, rs_encode

__version__ = "0.1.0"
