"""
𝓩 CCDF, FSO 페이딩 질량, BREP 급수에 필요한 스칼라 특수 함수

모든 함수는 인자만의 순수 함수이며 스레드 안전합니다.
"""

import logging
import math

import numpy as np
from scipy import special

from app.core.errors import DomainError, SeriesConvergenceError
from app.models.realizations import SeriesResult

logger = logging.getLogger(__name__)

KUMMER_REL_TOL = 1e-14
KUMMER_MAX_TERMS = 10_000


def ln_gamma(x: float) -> float:
    """ln Γ(x), x > 0"""
    if not x > 0:
        raise DomainError(f"ln_gamma 는 x > 0 에서만 정의됩니다: x={x}")
    return float(special.gammaln(x))


def kummer_1f1(
    a: float,
    b: float,
    z: float,
    rel_tol: float = KUMMER_REL_TOL,
    max_terms: int = KUMMER_MAX_TERMS,
) -> SeriesResult:
    """
    합류 초기하 함수 ₁F₁(a; b; z) 의 Taylor 급수

    다음 항의 크기가 rel_tol * |부분합| 보다 작아지면 멈춥니다.
    max_terms 안에 수렴하지 않으면 SeriesConvergenceError.
    """
    if b <= 0 and float(b).is_integer():
        raise DomainError(f"b 는 0 또는 음의 정수일 수 없습니다: b={b}")

    total = 1.0
    term = 1.0
    n = 0
    while True:
        term *= (a + n) / (b + n) * z / (n + 1)
        n += 1
        if abs(term) < rel_tol * abs(total) or term == 0.0:
            return SeriesResult(
                value=total, terms_used=n, truncation_bound=abs(term)
            )
        if n >= max_terms:
            raise SeriesConvergenceError(
                f"₁F₁({a}, {b}, {z}) 가 {max_terms}항 안에 수렴하지 않음",
                terms_used=n,
                last_term=abs(term),
            )
        total += term


def cos_weighted_rayleigh_mass(sigma0: float) -> float:
    """
    M(σ₀) = exp(-σ₀²/2) ₁F₁(-1/2, 1/2, σ₀²/2) = E[cos θ_d], θ_d ~ Rayleigh(σ₀)

    조건부 FSO 페이딩 밀도의 전체 질량입니다.
    """
    if not sigma0 > 0:
        raise DomainError(f"sigma0 > 0 이어야 합니다: sigma0={sigma0}")
    half_var = 0.5 * sigma0 * sigma0
    return math.exp(-half_var) * kummer_1f1(-0.5, 0.5, half_var).value


def gen_binom_coeff(r: float, n: int) -> float:
    """일반화 이항 계수 C(r, n) = r(r-1)...(r-n+1)/n! (누적 곱)"""
    if n < 0 or int(n) != n:
        raise DomainError(f"n 은 0 이상의 정수여야 합니다: n={n}")
    coeff = 1.0
    for k in range(1, int(n) + 1):
        coeff = coeff * ((r - k + 1) / k)
    return coeff


def gen_binom_coeffs(r: float, count: int) -> np.ndarray:
    """C(r, 0..count-1) 를 gen_binom_coeff 와 같은 곱 순서로 계산"""
    if count < 1:
        return np.empty(0)
    k = np.arange(1, count, dtype=float)
    factors = (r - k + 1) / k
    return np.concatenate(([1.0], np.cumprod(factors)))


def binomial_series(
    r: float,
    x: float,
    rel_tol: float = 1e-14,
    max_terms: int = KUMMER_MAX_TERMS,
) -> SeriesResult:
    """
    Σ_n (-1)^n C(r, n) e^{-n x} = (1 - e^{-x})^r 의 급수 평가

    x > 0 (e^{-x} < 1) 에서만 수렴합니다.
    """
    if not x > 0:
        raise DomainError(f"x > 0 이어야 급수가 수렴합니다: x={x}")
    q = math.exp(-x)
    total = 1.0
    coeff = 1.0
    power = 1.0
    for n in range(1, max_terms + 1):
        coeff = coeff * ((r - n + 1) / n)
        power *= q
        term = (-1) ** n * coeff * power
        if abs(term) < rel_tol * abs(total) or term == 0.0:
            return SeriesResult(
                value=total, terms_used=n, truncation_bound=abs(term)
            )
        total += term
    raise SeriesConvergenceError(
        f"이항 급수 (r={r}, x={x}) 가 {max_terms}항 안에 수렴하지 않음",
        terms_used=max_terms,
        last_term=abs(term),
    )


def binomial_series_tail(
    r: float,
    n: int,
    last_term: float,
    decay: float,
    rel_tol: float = 1e-16,
    max_terms: int = 1_000_000,
) -> float:
    """
    Σ_{k>n} a_k 의 추정, a_k = (-1)^k C(r, k) g_k

    g_k 가 비율 decay = g_n / g_{n-1} 로 기하 감소한다고 봅니다. decay ≥ 1 이면
    g 를 상수로 보고 Σ_{k≤n} (-1)^k C(r, k) = (-1)^n C(r-1, n) 에서 닫힌 형태
    a_n (n - r) / r 를 씁니다 (r > 0).
    """
    if last_term == 0.0:
        return 0.0
    if not r > 0:
        raise DomainError(f"꼬리 추정은 r > 0 에서만 정의됩니다: r={r}")
    if decay >= 1.0:
        return last_term * (n - r) / r
    if not decay > 0:
        return 0.0
    steps = int(min(max_terms, math.ceil(math.log(rel_tol) / math.log(decay)) + 1))
    k = n + np.arange(1, steps + 1, dtype=float)
    ratios = (k - 1.0 - r) / k * decay
    return float(last_term * np.cumprod(ratios).sum())


def alzer_beta(m1: int) -> float:
    """β = (m₁!)^{-1/m₁}"""
    if m1 < 1:
        raise DomainError(f"Alzer 경계는 m1 >= 1 에서만 성립합니다: m1={m1}")
    return math.exp(-ln_gamma(m1 + 1.0) / m1)


def alzer_gamma_cdf_bound(h, m1: int, m2: float):
    """
    Gamma(m₁, m₂) CDF 의 Alzer 경계 [1 - exp(-β h / m₂)]^{m₁}

    m₁ = 1 이면 정확하고 m₁ > 1 이면 CDF 의 하한 (CCDF 의 상한) 입니다.
    """
    beta = alzer_beta(m1)
    return (-np.expm1(-beta * np.asarray(h, dtype=float) / m2)) ** m1


def alzer_mean_ratio(m1: int) -> float:
    """
    Alzer 대체 분포의 평균 / 실제 Gamma 평균 = H_{m₁} (m₁!)^{1/m₁} / m₁

    대체 CDF 는 평균 m₂/β 인 지수 변수 m₁ 개의 최댓값 분포이므로
    평균이 (m₂/β) H_{m₁} 입니다. m₁ = 1 이면 정확히 1.
    """
    harmonic = sum(1.0 / k for k in range(1, m1 + 1))
    return harmonic / (alzer_beta(m1) * m1)
