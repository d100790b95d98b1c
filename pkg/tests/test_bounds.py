"""
Bounds 테스트
꼬리 상한 exp(-ν*(ln(t/γ))), 실제 꼬리 대비 검증, 날카로움 상수, subgaussian 특수화
"""

import math
import sys
from pathlib import Path

import numpy as np
import pytest

# 프로젝트 루트 디렉토리를 sys.path에 추가
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from modules.bounds import (
    growth_exponent, markov_bound, sharpness_constant, sharpness_ratio, subgaussian_bound,
    subgaussian_constant, tail_upper_bound, verify_domination,
)
from modules.errors import DomainError
from modules.function_model import (
    DisjointUnion, Indicator01Scaled, LogSingular, NaturalStretchedExp, PowerPsi, Scaled,
    StretchedExp, StretchedExpTail, TruncatedExp,
)
from modules.moments import natural_psi
from modules.numerics import gamma

T_GRID = np.geomspace(3.0, 100.0, 50)
SHARPNESS_GRID = [math.exp(-k) for k in range(2, 21)]


class TestTailUpperBound:
    """단일 t 상한"""

    @pytest.mark.parametrize("theta", [0.5, 1.0, 2.0])
    def test_01_natural_zero_above_one(self, theta):
        """테스트 1: NaturalStretchedExp(1,θ), γ=1, t=2 → 0 (ν* = +∞)"""
        bound = tail_upper_bound(NaturalStretchedExp(1.0, theta), 1.0, 2.0)
        assert bound.value == 0.0
        assert bound.log_value == -math.inf
        assert bound.conjugate.is_infinite

    def test_02_power_subgaussian(self):
        """테스트 2: PowerPsi(1,2), γ=1, t=10 → exp(-100/(2e))"""
        bound = tail_upper_bound(PowerPsi(1.0, 2.0), 1.0, 10.0)
        assert bound.log_value == pytest.approx(-100.0 / (2.0 * math.e), rel=1e-13)
        assert bound.value == pytest.approx(math.exp(-18.394), rel=1e-4)
        assert bound.in_theorem_region
        print(f"✅ 테스트 2 통과: bound = {bound.value:.4e}")

    def test_03_outside_theorem_region_flagged(self):
        """테스트 3: t=1 < e·γ 는 값은 계산하되 플래그 false"""
        bound = tail_upper_bound(PowerPsi(1.0, 2.0), 1.0, 1.0)
        assert not bound.in_theorem_region
        # ν*(0) = e^{-1}/2
        assert bound.value == pytest.approx(math.exp(-math.exp(-1.0) / 2.0), rel=1e-13)
        assert not tail_upper_bound(NaturalStretchedExp(1.0, 1.0), 1.0, 0.5).in_theorem_region

    def test_04_invalid_arguments(self):
        with pytest.raises(DomainError):
            tail_upper_bound(PowerPsi(1.0, 2.0), 0.0, 3.0)
        with pytest.raises(DomainError):
            tail_upper_bound(PowerPsi(1.0, 2.0), 1.0, -3.0)

    def test_05_gamma_covariance(self):
        """상한은 t/γ 에만 의존"""
        psi = PowerPsi(1.5, 2.0)
        for gamma_, t in [(2.0, 20.0), (0.5, 4.0)]:
            assert tail_upper_bound(psi, gamma_, t).log_value == \
                pytest.approx(tail_upper_bound(psi, 1.0, t / gamma_).log_value, rel=1e-13)

    def test_06_markov_consistency(self):
        """상한 ≤ 모든 단일 p Markov 상한"""
        psi = PowerPsi(1.0, 2.0)
        t = 10.0
        bound = tail_upper_bound(psi, 1.0, t).value
        for p in [0.5, 1.0, 5.0, math.e * 10, 50.0, 200.0]:
            assert bound <= markov_bound(psi, p, t) * (1.0 + 1e-12)

    def test_07_markov_outside_support(self):
        with pytest.raises(DomainError):
            markov_bound(PowerPsi(1.0, 2.0, (1.0, 3.0)), 5.0, 2.0)


class TestVerifyDomination:
    """실제 꼬리 대비 상한 검증"""

    @pytest.mark.parametrize("spec", [
        StretchedExp(1.0, 2.0),
        StretchedExp(0.5, 0.5),
        StretchedExp(2.0, 1.0),
        TruncatedExp(),
        LogSingular(),
        Indicator01Scaled(StretchedExp(1.0, 1.0)),
        DisjointUnion((LogSingular(), TruncatedExp())),
        Scaled(LogSingular(), 2.0),
    ])
    def test_01_natural_psi_dominates(self, spec):
        """테스트 1: 자연 ψ, γ = 1, t ∈ [3, 100] 50점 → dominated"""
        psi = natural_psi(spec, (0.5, math.inf))
        report = verify_domination(spec, psi, None, T_GRID)
        assert report.dominated
        assert report.gamma == 1.0
        assert report.gamma_source == "natural"
        assert report.violations == []
        assert len(report.t_grid) == 50

    def test_02_stretched_exp_zero_tail(self):
        """테스트 2: StretchedExp(1,2), t ∈ {3,…,10} → 모든 상한 ≥ 0 = 실제"""
        spec = StretchedExp(1.0, 2.0)
        report = verify_domination(spec, natural_psi(spec, (0.5, math.inf)), 1.0,
                                   [float(t) for t in range(3, 11)])
        assert report.dominated
        assert all(a == 0.0 for a in report.actual)
        assert all(b >= 0.0 for b in report.bound)
        # 0/0 점은 비율 통계에서 제외
        assert report.excluded_points == 8
        assert all(math.isnan(v) for v in report.ratio_range)

    def test_03_loose_psi(self):
        """테스트 3: ψ 를 키우면 상한은 느슨해질 뿐"""
        report = verify_domination(StretchedExp(1.0, 1.0), PowerPsi(10.0, 1.0), 1.0, T_GRID)
        assert report.dominated
        assert report.gamma_source == "given"

    def test_04_degenerate_grid(self):
        """테스트 4: {e·γ} 만 있는 격자 → 정리 영역 비교 없음, 공허하게 참"""
        report = verify_domination(LogSingular(), PowerPsi(1.0, 1.0), 1.0, [math.e])
        assert report.dominated
        assert report.summary()["theorem_points"] == 0

    def test_05_gamma_from_gls_norm(self):
        """자연 ψ 가 아니면 γ = ||f||Gψ"""
        report = verify_domination(LogSingular(), PowerPsi(1.0, 1.0, (1.0, math.inf)), None, T_GRID)
        assert report.gamma_source == "gls_norm"
        assert report.gamma == pytest.approx(1.0, rel=1e-6)
        assert report.dominated

    def test_06_ratio_range_positive(self):
        report = verify_domination(LogSingular(), PowerPsi(1.0, 1.0), 1.0, T_GRID)
        lo, hi = report.ratio_range
        assert 0 < lo <= hi < math.inf

    def test_07_report_frame_and_summary(self):
        report = verify_domination(LogSingular(), PowerPsi(1.0, 1.0), 1.0, T_GRID)
        frame = report.to_frame()
        assert list(frame.columns) == ["t", "bound", "actual", "in_region"]
        assert len(frame) == 50
        summary = report.summary()
        assert list(summary)[:3] == ["dominated", "ratio_range", "validity_region_start"]
        assert summary["validity_region_start"] == pytest.approx(math.e)

    def test_08_empty_grid(self):
        with pytest.raises(DomainError):
            verify_domination(LogSingular(), PowerPsi(1.0, 1.0), 1.0, [])


class TestSharpness:
    """자연 ψ 상한 / 실제 꼬리 = C(θ)"""

    def test_01_constants(self):
        """테스트 1: C(1) = e, C(2) = √(eπ/2)"""
        assert sharpness_constant(1.0) == pytest.approx(math.e, rel=1e-14)
        assert sharpness_constant(2.0) == pytest.approx(math.sqrt(math.e * math.pi / 2.0), rel=1e-13)
        assert sharpness_constant(0.5) == pytest.approx(
            math.exp(2.0) * 0.5 * gamma(2.0), rel=1e-13)

    @pytest.mark.parametrize("theta", [1.0, 2.0])
    def test_02_ratio_constant(self, theta):
        """테스트 2: max/min ≤ 1 + 1e-4, 상수는 C(θ) (1e-5)"""
        lo, hi = sharpness_ratio(theta, SHARPNESS_GRID)
        assert hi / lo <= 1.0 + 1e-4
        assert lo == pytest.approx(sharpness_constant(theta), rel=1e-5)
        print(f"✅ 테스트 2 통과: θ={theta}, ratio={lo:.8f}")

    @pytest.mark.parametrize("theta", [1.0, 2.0])
    def test_03_brute_force_conjugate(self, theta):
        """수치 켤레로도 같은 상수"""
        lo, hi = sharpness_ratio(theta, SHARPNESS_GRID, prefer_closed_form=False)
        assert hi / lo <= 1.0 + 1e-4
        assert lo == pytest.approx(sharpness_constant(theta), rel=1e-5)

    def test_04_single_point(self):
        lo, hi = sharpness_ratio(1.5, [math.exp(-1.0)])
        assert lo == hi

    def test_05_grid_outside_unit_interval(self):
        with pytest.raises(DomainError):
            sharpness_ratio(1.0, [0.5, 2.0])


class TestSubgaussian:
    """||f||_p ≤ C₁·p^{1/m} ⇒ exp(-c(m)·t^m)"""

    def test_01_unit_exponent(self):
        """테스트 1: m=2, C₁=1, t=√(2e) → e^{-1}"""
        assert subgaussian_bound(2.0, 1.0, math.sqrt(2.0 * math.e)) == pytest.approx(math.exp(-1.0), rel=1e-14)

    def test_02_scaled(self):
        """테스트 2: m=2, C₁=2, t=2√(2e) → e^{-1}"""
        assert subgaussian_bound(2.0, 2.0, 2.0 * math.sqrt(2.0 * math.e)) == pytest.approx(math.exp(-1.0), rel=1e-14)

    def test_03_small_t_at_most_one(self):
        for t in [1e-9, 1e-3, 0.1]:
            assert 0 < subgaussian_bound(1.0, 1.0, t) <= 1.0

    @pytest.mark.parametrize("m,C1", [(1.0, 1.0), (2.0, 1.0), (2.0, 2.0), (0.5, 1.0), (4.0, 3.0)])
    def test_04_matches_tail_upper_bound(self, m, C1):
        """PowerPsi 상한과 1e-9 일치 (로그 비교)"""
        psi = PowerPsi(C1, m)
        for t in [5.0, 10.0, 50.0]:
            expected = -(t / C1) ** m / (m * math.e)
            got = tail_upper_bound(psi, 1.0, t).log_value
            assert abs(got - expected) <= 1e-9 * abs(expected)
            assert subgaussian_bound(m, C1, t) == pytest.approx(math.exp(expected), rel=1e-9)
            assert expected == pytest.approx(-subgaussian_constant(m, C1) * t ** m, rel=1e-13)

    @pytest.mark.parametrize("m", [0.5, 1.0, 2.0, 3.0])
    def test_05_shape_slope(self, m):
        """ln(-ln bound) 대 ln t 기울기 = m"""
        psi = PowerPsi(1.0, m)
        t = np.geomspace(5.0, 50.0, 20)
        y = [math.log(-tail_upper_bound(psi, 1.0, float(v)).log_value) for v in t]
        slope, _ = np.polyfit(np.log(t), y, 1)
        assert slope == pytest.approx(m, abs=1e-3)

    def test_06_tail_to_psi_round_trip(self):
        """꼬리 exp(-t²) → 자연 ψ → 성장 지수 ≈ 1/2"""
        psi = natural_psi(StretchedExpTail(1.0, 2.0), (1.0, math.inf), grid_size=48)
        assert growth_exponent(psi) == pytest.approx(0.5, abs=0.02)

    def test_07_growth_exponent_power(self):
        assert growth_exponent(PowerPsi(3.0, 2.0), p_grid=np.geomspace(1, 100, 10)) == pytest.approx(0.5, rel=1e-12)
        with pytest.raises(DomainError):
            growth_exponent(PowerPsi(3.0, 2.0))

    def test_08_invalid(self):
        with pytest.raises(DomainError):
            subgaussian_bound(0.0, 1.0, 1.0)
        with pytest.raises(DomainError):
            subgaussian_bound(2.0, 1.0, 0.0)


if __name__ == "__main__":
    pytest.main([__file__, "-v", "-s"])
