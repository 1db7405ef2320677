"""masmark: blind audio watermarking over moving-average DCT coefficients.

Embeds binary payloads by quantization index modulation of the maximal
DCT coefficient of a moving-average sequence of the audio, locates them
again through a synchronization-code search, and ships the channel
attacks and metrics needed to evaluate robustness.
"""

from .audio_io import AudioClip, WavFormatError, load_wav, read_wav, save_wav, write_wav
from .codec import (
    DEFAULT_SYNC_HEX,
    EmbedParams,
    ExtractionReport,
    detect_sync,
    embed,
    extract,
    majority_vote,
    random_payload,
    select_block_length,
    sync_bits_from_hex,
)
from .metrics import BerResult, ber, snr_db, zero_crossings

__version__ = "0.1.0"

__all__ = [
    "AudioClip",
    "WavFormatError",
    "read_wav",
    "write_wav",
    "load_wav",
    "save_wav",
    "EmbedParams",
    "ExtractionReport",
    "DEFAULT_SYNC_HEX",
    "sync_bits_from_hex",
    "random_payload",
    "select_block_length",
    "embed",
    "extract",
    "detect_sync",
    "majority_vote",
    "BerResult",
    "ber",
    "snr_db",
    "zero_crossings",
    "__version__",
]
