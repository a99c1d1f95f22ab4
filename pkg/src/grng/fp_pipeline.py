"""Binary32 emulation of the FPGA Gaussian-generator datapath.

Every arithmetic block ("core") consumes IEEE-754 binary32 operands and
produces a binary32 result rounded to nearest-even exactly once, plus the
exception flags its hardware counterpart exposes:

* LOG    -- natural log; `zero` fires for input 1.0, `nan` for negative or
  NaN input.  log(+-0) follows IEEE and returns -inf with no flag.
* SIN/COS -- no exception ports; non-finite inputs simply produce NaN.
* DIV    -- `overflow` when a finite-operand quotient reaches infinity
  (division by zero propagates infinity without overflow), `underflow`
  when the result is zero or denormal although neither input is zero,
  `nan` for invalid divisions (0/0, inf/inf, NaN operands), `zero` when
  the result is zero.
* SQRT   -- `nan` for negative or NaN input, `zero` for a zero result,
  `overflow` only when the result reaches infinity (input +inf).
* MUL/ADD -- external multiplier/adder blocks; the vendor sheets the rest
  of this module follows do not document their ports, so they carry the
  generic IEEE-derived flags.  Subtraction is the ADD core fed a negated
  operand (a free sign flip in hardware).

DIV, SQRT, MUL and ADD are correctly rounded (native binary32 operations).
LOG, SIN and COS evaluate in double precision and round once to binary32,
which is faithful within 1 ulp of the correctly rounded result.

`run_graph` composes the cores into the three published architectures and
returns a per-invocation trace whose invocation counts match the static
structure of each design: box-muller uses LOG, SQRT, SIN, COS and four
multipliers; polar uses LOG, SQRT, DIV, five multipliers and one adder per
accepted pair; clt uses SQRT, DIV, two multipliers and one adder beyond
the k-1 additions that accumulate the uniform sum.  The polar graph takes
disk coordinates v = 2u - 1 as its two inputs: the affine conditioning,
like the integer-to-float conversion, happens upstream of the counted
datapath.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "ArityMismatchError",
    "CoreResult",
    "PipelineTrace",
    "core_add",
    "core_cos",
    "core_div",
    "core_log",
    "core_mul",
    "core_sin",
    "core_sincos",
    "core_sqrt",
    "expected_core_counts",
    "f32",
    "f32_from_bits",
    "f32_to_bits",
    "pipeline_stream",
    "run_graph",
    "uniform_to_f32",
]

F32_TWO_PI = np.float32(2.0 * math.pi)
F32_NEG_TWO = np.float32(-2.0)
F32_HALF = np.float32(0.5)
F32_TWELFTH = np.float32(1.0 / 12.0)

_SMALLEST_NORMAL = 2.0 ** -126


class ArityMismatchError(ValueError):
    """Input count does not match the architecture graph."""


def f32(x):
    """Round any real to binary32 (nearest even)."""
    return np.float32(x)


def f32_to_bits(x):
    """Bit pattern of a binary32 value as an int."""
    return int(np.float32(x).view(np.uint32))


def f32_from_bits(bits):
    """Binary32 value for a 32-bit pattern."""
    return np.uint32(bits).view(np.float32)


def _hex32(x):
    return f"{f32_to_bits(x):08x}"


def _is_denormal(x):
    x = float(x)
    return x != 0.0 and math.isfinite(x) and abs(x) < _SMALLEST_NORMAL


@dataclass(frozen=True)
class CoreResult:
    """Binary32 core output with its exception flags."""

    result: np.float32
    zero: bool = False
    nan: bool = False
    overflow: bool = False
    underflow: bool = False

    @property
    def flags(self):
        return {"zero": self.zero, "nan": self.nan,
                "overflow": self.overflow, "underflow": self.underflow}


@dataclass
class PipelineTrace:
    """Per-invocation record of core activity.

    Traces are plain per-call values and are never shared between graph
    invocations.  Latencies are metadata only: they contribute to
    total_cycles but never change any computed value.  Asynchronous-clear
    events (`aclr`) are likewise recorded as sentinel entries only.
    """

    latencies: dict = field(default_factory=dict)
    records: list = field(default_factory=list)
    counts: Counter = field(default_factory=Counter)
    flag_counts: Counter = field(default_factory=Counter)
    total_cycles: int = 0

    def record(self, core, inputs, result):
        cycles = self.latencies.get(core, 1)
        self.counts[core] += 1
        self.total_cycles += cycles
        for name, on in result.flags.items():
            if on:
                self.flag_counts[name] += 1
        self.records.append({
            "core": core,
            "input_bits_hex": [_hex32(v) for v in inputs],
            "output_bits_hex": _hex32(result.result),
            "flags": result.flags,
            "cycles": cycles,
        })
        return result

    def clear_event(self, core):
        """Record an asynchronous clear: a sentinel entry, no datapath effect."""
        self.records.append({"core": core, "event": "aclr"})

    def to_dict(self):
        return {
            "records": self.records,
            "counts": dict(self.counts),
            "flag_counts": dict(self.flag_counts),
            "total_cycles": self.total_cycles,
        }


def core_log(x):
    """Natural logarithm core (binary32 in, binary32 out)."""
    xf = np.float32(x)
    v = float(xf)
    if math.isnan(v):
        r = np.float32("nan")
    elif v < 0.0:
        r = np.float32("nan")
    elif v == 0.0:
        r = np.float32("-inf")
    elif math.isinf(v):
        r = np.float32("inf")
    else:
        r = np.float32(math.log(v))
    return CoreResult(result=r, zero=bool(r == 0.0),
                      nan=math.isnan(v) or v < 0.0)


def core_sincos(x, mode):
    """Trigonometric core; `mode` is "sin" or "cos".  No exception ports."""
    xf = np.float32(x)
    v = float(xf)
    if not math.isfinite(v):
        r = np.float32("nan")
    elif mode == "sin":
        r = np.float32(math.sin(v))
    elif mode == "cos":
        r = np.float32(math.cos(v))
    else:
        raise ValueError(f"mode must be 'sin' or 'cos', got {mode!r}")
    return CoreResult(result=r)


def core_sin(x):
    return core_sincos(x, "sin")


def core_cos(x):
    return core_sincos(x, "cos")


def core_div(a, b):
    """Correctly rounded binary32 division with the documented flag set."""
    af, bf = np.float32(a), np.float32(b)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore",
                     under="ignore"):
        q = np.divide(af, bf)
    a64, b64, q64 = float(af), float(bf), float(q)
    finite_inputs = math.isfinite(a64) and math.isfinite(b64)
    return CoreResult(
        result=q,
        zero=bool(q64 == 0.0),
        nan=math.isnan(q64),
        overflow=math.isinf(q64) and finite_inputs and b64 != 0.0,
        underflow=(q64 == 0.0 or _is_denormal(q64)) and a64 != 0.0 and b64 != 0.0,
    )


def core_sqrt(x):
    """Correctly rounded binary32 square root with the documented flag set."""
    xf = np.float32(x)
    with np.errstate(invalid="ignore"):
        r = np.sqrt(xf)
    v, rv = float(xf), float(r)
    return CoreResult(
        result=r,
        zero=bool(rv == 0.0),
        nan=math.isnan(rv),
        overflow=rv == math.inf,
    )


def _generic_flags(r, a64, b64):
    rv = float(r)
    return dict(
        zero=bool(rv == 0.0),
        nan=math.isnan(rv),
        overflow=math.isinf(rv) and math.isfinite(a64) and math.isfinite(b64),
        underflow=_is_denormal(rv),
    )


def core_mul(a, b):
    af, bf = np.float32(a), np.float32(b)
    with np.errstate(over="ignore", under="ignore", invalid="ignore"):
        r = np.multiply(af, bf)
    return CoreResult(result=r, **_generic_flags(r, float(af), float(bf)))


def core_add(a, b):
    af, bf = np.float32(a), np.float32(b)
    with np.errstate(over="ignore", under="ignore", invalid="ignore"):
        r = np.add(af, bf)
    return CoreResult(result=r, **_generic_flags(r, float(af), float(bf)))


def uniform_to_f32(word, order):
    """Convert an n-bit LFSR word to the binary32 nearest word / 2**n."""
    return np.float32(float(word) * 2.0 ** -order)


def run_graph(algo, inputs, *, k=None, latencies=None, trace=None):
    """Evaluate one architecture graph on binary32 inputs.

    Returns (outputs, trace).  Inputs: (u1, u2) for box-muller, disk
    coordinates (v1, v2) for polar, k uniforms for clt.  A rejected polar
    proposal returns no outputs and a trace holding only the two squaring
    multipliers and the adder that computed s.
    """
    t = trace if trace is not None else PipelineTrace(latencies=latencies or {})
    xs = [np.float32(v) for v in inputs]

    if algo == "box-muller":
        if len(xs) != 2:
            raise ArityMismatchError("box-muller graph takes 2 inputs")
        u1, u2 = xs
        l = t.record("log", [u1], core_log(u1)).result
        m1 = t.record("mul", [F32_NEG_TWO, l], core_mul(F32_NEG_TWO, l)).result
        r = t.record("sqrt", [m1], core_sqrt(m1)).result
        theta = t.record("mul", [F32_TWO_PI, u2], core_mul(F32_TWO_PI, u2)).result
        s = t.record("sin", [theta], core_sin(theta)).result
        c = t.record("cos", [theta], core_cos(theta)).result
        alpha = t.record("mul", [r, s], core_mul(r, s)).result
        beta = t.record("mul", [r, c], core_mul(r, c)).result
        return [alpha, beta], t

    if algo == "polar":
        if len(xs) != 2:
            raise ArityMismatchError("polar graph takes 2 inputs")
        v1, v2 = xs
        sq1 = t.record("mul", [v1, v1], core_mul(v1, v1)).result
        sq2 = t.record("mul", [v2, v2], core_mul(v2, v2)).result
        s = t.record("add", [sq1, sq2], core_add(sq1, sq2)).result
        if not 0.0 < float(s) < 1.0:
            return [], t
        l = t.record("log", [s], core_log(s)).result
        m = t.record("mul", [F32_NEG_TWO, l], core_mul(F32_NEG_TWO, l)).result
        d = t.record("div", [m, s], core_div(m, s)).result
        r = t.record("sqrt", [d], core_sqrt(d)).result
        alpha = t.record("mul", [v1, r], core_mul(v1, r)).result
        beta = t.record("mul", [v2, r], core_mul(v2, r)).result
        return [alpha, beta], t

    if algo == "clt":
        kk = k if k is not None else len(xs)
        if len(xs) != kk or kk < 2:
            raise ArityMismatchError(f"clt graph takes k={kk} inputs, got {len(xs)}")
        acc = xs[0]
        for u in xs[1:]:
            acc = t.record("add", [acc, u], core_add(acc, u)).result
        kf = np.float32(kk)
        m1 = t.record("mul", [kf, F32_HALF], core_mul(kf, F32_HALF)).result
        num = t.record("add", [acc, -m1], core_add(acc, -m1)).result
        m2 = t.record("mul", [kf, F32_TWELFTH], core_mul(kf, F32_TWELFTH)).result
        den = t.record("sqrt", [m2], core_sqrt(m2)).result
        z = t.record("div", [num, den], core_div(num, den)).result
        return [z], t

    raise ValueError(f"unknown algorithm {algo!r}")


def expected_core_counts(algo, *, k=12, accepted=True):
    """Static invocation counts of one graph pass (one pair, or one value)."""
    if algo == "box-muller":
        return {"log": 1, "sqrt": 1, "sin": 1, "cos": 1, "mul": 4}
    if algo == "polar":
        if not accepted:
            return {"mul": 2, "add": 1}
        return {"log": 1, "sqrt": 1, "div": 1, "mul": 5, "add": 1}
    if algo == "clt":
        return {"sqrt": 1, "div": 1, "mul": 2, "add": k}
    raise ValueError(f"unknown algorithm {algo!r}")


# -- vectorized batch path -----------------------------------------------------
#
# The batch path reproduces the scalar graphs bit for bit: pure binary32
# arithmetic (mul/add/div/sqrt/compare) is IEEE-identical between numpy
# array ops and the scalar cores, and the transcendentals below call the
# same double-precision math.* routines the scalar cores use before the
# single rounding to binary32.


def _log32(values32):
    return np.array([math.log(float(v)) for v in values32],
                    dtype=np.float64).astype(np.float32)


def _sin32(theta32):
    return np.array([math.sin(float(v)) for v in theta32],
                    dtype=np.float64).astype(np.float32)


def _cos32(theta32):
    return np.array([math.cos(float(v)) for v in theta32],
                    dtype=np.float64).astype(np.float32)


def _uniforms_f32(source, count):
    words = source.words(count)
    return (words.astype(np.float64) * 2.0 ** -source.config.order).astype(np.float32)


def _scaled_counts(per_pass, passes):
    return {core: n * passes for core, n in per_pass.items()}


def pipeline_stream(algo, sources, count, *, clt=None):
    """Batch pipeline-mode generation; see transforms.stream for the contract."""
    from .transforms import CltConfig, StreamResult

    clt = clt or CltConfig()
    if count == 0:
        return StreamResult(values=np.empty(0, dtype=np.float32),
                            uniforms_consumed=0, algorithm=algo,
                            mode="pipeline", core_counts={})

    if algo == "box-muller":
        if len(sources) != 2:
            raise ValueError("box-muller needs exactly 2 uniform sources")
        pairs = (count + 1) // 2
        u1 = _uniforms_f32(sources[0], pairs)
        u2 = _uniforms_f32(sources[1], pairs)
        l = _log32(u1)
        r = np.sqrt(F32_NEG_TWO * l)
        theta = F32_TWO_PI * u2
        out = np.empty(2 * pairs, dtype=np.float32)
        out[0::2] = r * _sin32(theta)
        out[1::2] = r * _cos32(theta)
        return StreamResult(
            values=out[:count], uniforms_consumed=2 * pairs, algorithm=algo,
            mode="pipeline",
            core_counts=_scaled_counts(expected_core_counts("box-muller"), pairs),
        )

    if algo == "polar":
        if len(sources) != 2:
            raise ValueError("polar needs exactly 2 uniform sources")
        two = np.float32(2.0)
        one = np.float32(1.0)
        chunks = []
        have = 0
        proposed = accepted = 0
        while have < count:
            need_pairs = (count - have + 1) // 2
            block = max(256, int(need_pairs / 0.80) + 1)
            v1 = two * _uniforms_f32(sources[0], block) - one
            v2 = two * _uniforms_f32(sources[1], block) - one
            s = v1 * v1 + v2 * v2
            keep = (s > np.float32(0.0)) & (s < one)
            v1k, v2k, sk = v1[keep], v2[keep], s[keep]
            m = F32_NEG_TWO * _log32(sk)
            factor = np.sqrt(m / sk)
            vals = np.empty(2 * len(sk), dtype=np.float32)
            vals[0::2] = v1k * factor
            vals[1::2] = v2k * factor
            proposed += block
            accepted += len(sk)
            chunks.append(vals)
            have += vals.size
        counts = Counter()
        counts.update(_scaled_counts(expected_core_counts("polar"), accepted))
        counts.update(_scaled_counts(expected_core_counts("polar", accepted=False),
                                     proposed - accepted))
        return StreamResult(
            values=np.concatenate(chunks)[:count], uniforms_consumed=2 * proposed,
            algorithm=algo, mode="pipeline",
            pairs_proposed=proposed, pairs_accepted=accepted,
            core_counts=dict(counts),
        )

    if algo == "clt":
        k = clt.k
        if len(sources) != k:
            raise ValueError(f"clt with k={k} needs {k} uniform sources")
        acc = _uniforms_f32(sources[0], count)
        for src in sources[1:]:
            acc = acc + _uniforms_f32(src, count)
        kf = np.float32(k)
        num = acc + (-(kf * F32_HALF))
        den = np.sqrt(kf * F32_TWELFTH)
        z = num / den
        return StreamResult(
            values=z, uniforms_consumed=k * count, algorithm=algo,
            mode="pipeline",
            core_counts=_scaled_counts(expected_core_counts("clt", k=k), count),
        )

    raise ValueError(f"unknown algorithm {algo!r}")
