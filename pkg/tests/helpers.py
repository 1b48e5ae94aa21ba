"""Shared test utilities: WAV synthesis and quadrature oracles.

The WAV writers are deliberately independent of the package reader (raw
struct packing) so reader tests have a synthesis oracle to check against.
"""

import math
import struct

import numpy as np

from pwncg.distributions import ComplexParams, log_pdf_complex


def write_wav_pcm16(path, samples, sample_rate, channels=1):
    x = np.clip(np.asarray(samples, dtype=float), -1.0, 1.0)
    if channels > 1:
        x = np.repeat(x[:, None], channels, axis=1)
        x[:, 1:] *= 0.5  # make extra channels distinguishable
    pcm = np.round(x * 32767.0).astype("<i2").tobytes()
    block = 2 * channels
    with open(path, "wb") as fh:
        fh.write(b"RIFF" + struct.pack("<I", 36 + len(pcm)) + b"WAVE")
        fh.write(
            b"fmt "
            + struct.pack(
                "<IHHIIHH", 16, 1, channels, sample_rate, sample_rate * block, block, 16
            )
        )
        fh.write(b"data" + struct.pack("<I", len(pcm)) + pcm)


def write_wav_float32(path, samples, sample_rate):
    raw = np.asarray(samples, dtype="<f4").tobytes()
    with open(path, "wb") as fh:
        fh.write(b"RIFF" + struct.pack("<I", 36 + len(raw)) + b"WAVE")
        fh.write(
            b"fmt "
            + struct.pack("<IHHIIHH", 16, 3, 1, sample_rate, sample_rate * 4, 4, 32)
        )
        fh.write(b"data" + struct.pack("<I", len(raw)) + raw)


def make_speech_like(duration_s=1.1, sample_rate=16000, seed=2024):
    """Synthesized speech-like signal: voiced harmonic stretches with
    vibrato, pitch jitter, syllable-rate amplitude modulation and shimmer,
    alternating with fricative-like noise bursts and near-silence.

    The jitter and shimmer matter: without them the voiced patches are so
    stationary that their power statistics become strongly noncentral,
    which real speech patches are not.
    """
    rng = np.random.default_rng(seed)
    n = int(duration_s * sample_rate)
    t = np.arange(n) / sample_rate
    sig = np.zeros(n)

    seg = int(0.16 * sample_rate)
    pos = 0
    voiced = True
    while pos < n:
        end = min(pos + seg, n)
        tt = t[pos:end] - t[pos]
        if voiced:
            f0 = rng.uniform(95.0, 220.0)
            jitter = np.cumsum(rng.normal(0.0, 2.0, end - pos)) / sample_rate
            vibrato = 4.0 * np.sin(2 * np.pi * 5.5 * tt) / (2 * np.pi * 5.5)
            phase = 2 * np.pi * (f0 * tt + vibrato + jitter)
            frame = np.zeros(end - pos)
            for h in range(1, 12):
                frame += rng.uniform(0.2, 1.0) / h * np.sin(h * phase + rng.uniform(0, 2 * np.pi))
            am = 0.55 + 0.45 * np.sin(2 * np.pi * 9.0 * tt + rng.uniform(0, 2 * np.pi))
            shimmer = np.interp(
                np.arange(end - pos),
                np.linspace(0.0, end - pos, 20),
                1.0 + 0.35 * rng.standard_normal(20),
            )
            frame *= am * np.abs(shimmer) * rng.uniform(0.5, 1.0)
            frame += 0.15 * np.std(frame) * rng.standard_normal(end - pos)
        else:
            kind = rng.random()
            if kind < 0.4:
                frame = 0.25 * rng.standard_normal(end - pos)  # fricative-ish
                frame *= np.linspace(1.0, 0.3, len(frame))
            else:
                frame = 0.02 * rng.standard_normal(end - pos)  # near-silence
        sig[pos:end] += frame
        pos = end
        voiced = not voiced

    peak = np.max(np.abs(sig))
    return 0.8 * sig / peak if peak > 0 else sig


def complex_normalization(p: ComplexParams, n_r=800, n_t=512) -> float:
    """Integral of the complex density over a truncated disc by polar
    Gauss-Legendre (radial) x trapezoid (angular) quadrature."""
    radius = abs(p.mu) + 12.0 * math.sqrt(p.sigma2) + 3.0
    xs, ws = np.polynomial.legendre.leggauss(n_r)
    r = 0.5 * radius * (xs + 1.0)
    wr = 0.5 * radius * ws
    th = np.linspace(-np.pi, np.pi, n_t, endpoint=False)
    wt = 2.0 * np.pi / n_t
    z = r[:, None] * np.exp(1j * th[None, :])
    log_dens = log_pdf_complex(z.ravel(), p).reshape(z.shape)
    return float(np.sum(np.exp(log_dens) * (r * wr)[:, None]) * wt)
