"""McNie: code-based public-key encryption over rank-metric LRPC codes."""
from .errors import (DecryptionFailure, FormatError, GenerationError, IntegrityError, McNieError,
                     ParameterError, ShapeError, SingularMatrixError, StructureError, UnsupportedError)
from .galois import GF2m, FieldElement, Subspace, field, rank_weight, support
from .params import NAMED, ParamSet, get_params, validate_params
from .pke import Ciphertext, PrivateKey, PublicKey, decrypt, encrypt, keygen, public_key_bits
from .rng import Drbg

__version__ = "0.1.0"
