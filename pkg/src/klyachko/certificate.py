"""Witness certificates, the independent verifier, and the text document.

A certificate for (g, r, r') is an element y of H_{r,2k} with a sign eps.
It proves the claim when z = g^{-1} y T_eps(g) lies in Hbar_{r',2k'} and
either eps = +1 with a nontrivial value, or eps = -1, r = r' with a trivial
value.  The value is theta(y, z) = psi_{r,2k}(y) psi_{r',2k'}(z^tau).

The verifier only uses matrix arithmetic and the membership predicates.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import CertificateFormatError, DimensionError, SingularMatrixError
from .exactfield import CharacterValue
from .matlin import Matrix, parse_matrix, to_text
from .modelgroups import PairShape, in_H, psi_model

CERT_VERSION = "kly-cert/1"


@dataclass(frozen=True)
class WitnessCertificate:
    y: Matrix
    eps: int
    value: CharacterValue
    trace: tuple = field(default=(), compare=False)

    def with_trace(self, *lines) -> "WitnessCertificate":
        return WitnessCertificate(self.y, self.eps, self.value, tuple(lines) + self.trace)


@dataclass(frozen=True)
class Verdict:
    ok: bool
    clause: str | None = None
    reason: str = ""

    def __bool__(self):
        return self.ok

    def __str__(self):
        if self.ok:
            return "PASS"
        return f"FAIL clause ({self.clause}): {self.reason}"


def partner(g: Matrix, y: Matrix, eps: int) -> Matrix:
    """z = g^{-1} y T_eps(g)."""
    return g.inv() @ y @ (g if eps == 1 else g.T)


def verify_certificate(g: Matrix, shape: PairShape, cert: WitnessCertificate) -> Verdict:
    if g.shape != (shape.n, shape.n) or cert.y.shape != (shape.n, shape.n):
        raise DimensionError(f"matrices must be {shape.n}x{shape.n}")
    if g.p != cert.y.p or cert.value.p != g.p:
        raise DimensionError("certificate and matrix live over different fields")
    try:
        ginv = g.inv()
    except SingularMatrixError:
        raise SingularMatrixError("g is not invertible") from None
    y = cert.y
    if not in_H(y, shape.left):
        return Verdict(False, "a", f"y is not in H_{{{shape.r},{2 * shape.k}}}")
    if cert.eps not in (1, -1):
        return Verdict(False, "d", f"eps must be +1 or -1, got {cert.eps}")
    z = ginv @ y @ (g if cert.eps == 1 else g.T)
    ztau = z.inv().T
    if not in_H(ztau, shape.right):
        return Verdict(False, "b", f"g^-1 y T(g) is not in Hbar_{{{shape.rp},{2 * shape.kp}}}")
    value = psi_model(y, shape.left) * psi_model(ztau, shape.right)
    if value != cert.value:
        return Verdict(False, "c", f"recorded value {cert.value} but recomputed {value}")
    if cert.eps == 1 and value.is_trivial:
        return Verdict(False, "d", "eps = +1 but the character value is trivial")
    if cert.eps == -1:
        if shape.r != shape.rp:
            return Verdict(False, "d", "eps = -1 requires r = r'")
        if not value.is_trivial:
            return Verdict(False, "d", "eps = -1 but the character value is nontrivial")
    return Verdict(True)


# text document ----------------------------------------------------------------

def _matrix_block(m: Matrix) -> list:
    return to_text(m).rstrip("\n").split("\n")


def dump_certificate(g: Matrix, shape: PairShape, cert: WitnessCertificate) -> str:
    lines = [
        CERT_VERSION,
        f"p={g.p}",
        f"n={shape.n}",
        f"r={shape.r}",
        f"rprime={shape.rp}",
        f"epsilon={cert.eps:+d}",
        f"value={cert.value.exponent}",
        "g:",
        *_matrix_block(g),
        "y:",
        *_matrix_block(cert.y),
    ]
    lines += [f"trace: {t}" for t in cert.trace]
    return "\n".join(lines) + "\n"


def load_certificate(text: str):
    """Inverse of :func:`dump_certificate`; returns (g, shape, cert)."""
    lines = [ln.rstrip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln.strip()]
    if not lines or lines[0].strip() != CERT_VERSION:
        raise CertificateFormatError(f"missing version tag {CERT_VERSION!r}")
    header = {}
    idx = 1
    while idx < len(lines) and "=" in lines[idx] and not lines[idx].endswith(":"):
        key, val = lines[idx].split("=", 1)
        header[key.strip()] = val.strip()
        idx += 1
    try:
        p = int(header["p"])
        n = int(header["n"])
        r = int(header["r"])
        rp = int(header["rprime"])
        eps = int(header["epsilon"])
        exponent = int(header["value"])
    except (KeyError, ValueError) as exc:
        raise CertificateFormatError(f"bad or missing header field: {exc}") from None

    def read_matrix(tag, start):
        if start >= len(lines) or lines[start].strip() != tag:
            raise CertificateFormatError(f"expected {tag!r} section")
        block = lines[start + 1:start + 2 + n]
        try:
            m = parse_matrix("\n".join(block))
        except ValueError as exc:
            raise CertificateFormatError(f"bad matrix in {tag!r} section: {exc}") from None
        if m.shape != (n, n) or m.p != p:
            raise CertificateFormatError(f"matrix in {tag!r} section does not match n={n}, p={p}")
        return m, start + 2 + n

    g, idx = read_matrix("g:", idx)
    y, idx = read_matrix("y:", idx)
    trace = tuple(ln[len("trace: "):] for ln in lines[idx:] if ln.startswith("trace:"))
    try:
        shape = PairShape(n, r, rp)
    except ValueError as exc:
        raise CertificateFormatError(str(exc)) from None
    return g, shape, WitnessCertificate(y, eps, CharacterValue(p, exponent), trace)
