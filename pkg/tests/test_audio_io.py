import struct

import numpy as np
import pytest

from masmark.audio_io import AudioClip, WavFormatError, read_wav, write_wav


def make_wav(pcm: bytes, rate=44100, fmt=1, channels=1, bits=16, extra_chunk=None):
    """Assemble a WAV byte string by hand so the parser is tested cold."""
    block = channels * bits // 8
    header = b"fmt " + struct.pack("<IHHIIHH", 16, fmt, channels, rate,
                                   rate * block, block, bits)
    if extra_chunk is not None:
        header = extra_chunk + header
    body = header + b"data" + struct.pack("<I", len(pcm)) + pcm
    return b"RIFF" + struct.pack("<I", 4 + len(body)) + b"WAVE" + body


def test_reads_scaled_samples():
    clip = read_wav(make_wav(struct.pack("<2h", 0, 16384)))
    assert clip.sample_rate == 44100
    np.testing.assert_array_equal(clip.samples, [0.0, 0.5])


def test_write_emits_expected_integers():
    data = write_wav(AudioClip(np.array([0.0, 0.5]), 44100))
    assert data[:4] == b"RIFF" and data[8:12] == b"WAVE"
    assert len(data) == 44 + 4
    assert struct.unpack("<2h", data[44:]) == (0, 16384)


def test_clamps_out_of_range_on_write():
    data = write_wav(AudioClip(np.array([2.0, -2.0]), 44100))
    assert struct.unpack("<2h", data[44:]) == (32767, -32768)


def test_data_roundtrip_is_byte_exact(rng):
    ints = rng.integers(-32768, 32768, size=4096, dtype=np.int16)
    original = make_wav(ints.astype("<i2").tobytes())
    rewritten = write_wav(read_wav(original))
    assert rewritten[44:] == original[44:]


def test_skips_unknown_chunks_with_odd_padding():
    # 3-byte LIST chunk body takes a pad byte before the next chunk
    extra = b"LIST" + struct.pack("<I", 3) + b"abc\x00"
    clip = read_wav(make_wav(struct.pack("<2h", -32768, 32767), extra_chunk=extra))
    np.testing.assert_allclose(clip.samples, [-1.0, 32767 / 32768])


def test_grid_values_roundtrip_through_float():
    ints = np.arange(-32768, 32768, 97, dtype=np.int16)
    clip = read_wav(make_wav(ints.astype("<i2").tobytes()))
    back = read_wav(write_wav(clip))
    np.testing.assert_array_equal(back.samples, clip.samples)


def test_integer_zero_maps_to_real_zero():
    clip = read_wav(make_wav(struct.pack("<h", 0)))
    assert clip.samples[0] == 0.0


@pytest.mark.parametrize("mangle, message", [
    (lambda b: b"JUNK" + b[4:], "RIFF"),
    (lambda b: b[:30], "fmt chunk"),  # cut mid-fmt
    (lambda b: b[:36], "data"),       # complete fmt, then nothing
])
def test_malformed_container(mangle, message):
    wav = make_wav(struct.pack("<2h", 1, 2))
    with pytest.raises(WavFormatError, match=message):
        read_wav(mangle(wav))


def test_rejects_float_format():
    with pytest.raises(WavFormatError, match="format tag"):
        read_wav(make_wav(b"\x00" * 8, fmt=3))


def test_rejects_other_bit_depths():
    with pytest.raises(WavFormatError, match="bit depth"):
        read_wav(make_wav(b"\x00" * 8, bits=8))


def test_rejects_stereo():
    with pytest.raises(WavFormatError, match="channel count"):
        read_wav(make_wav(b"\x00" * 8, channels=2))


def test_rejects_empty_clip_on_write():
    with pytest.raises(ValueError):
        write_wav(AudioClip(np.array([]), 44100))


def test_rejects_bad_sample_rate():
    with pytest.raises(ValueError):
        AudioClip(np.zeros(4), 0)
