"""
Function Model 테스트
함수 스펙, 꼬리 함수, 생성 함수 ψ, 직렬화
"""

import math
import sys
from pathlib import Path

import numpy as np
import pytest

# 프로젝트 루트 디렉토리를 sys.path에 추가
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from modules.errors import DomainError, SpecParseError
from modules.function_model import (
    CappedTail, ConstantPsi, DisjointUnion, Indicator01Scaled, LogPowerTail, LogSingular,
    NaturalStretchedExp, PiecewiseSum, PowerPsi, Scaled, ScaledTail, StretchedExp,
    StretchedExpTail, Tabulated, TabulatedPsi, TruncatedExp,
    eval_psi, eval_tail, psi_from_dict, source_from_dict, spec_from_dict, tail_from_dict,
    tail_of,
)


@pytest.fixture
def union_spec():
    """LogSingular on (-1,0) + e^{-y} on (0,∞)"""
    return DisjointUnion((LogSingular(), TruncatedExp()))


class TestTailOf:
    """꼬리 함수 유도 테스트"""

    @pytest.mark.parametrize("theta", [0.5, 1.0, 2.0, 3.0])
    def test_01_stretched_exp_tail(self, theta):
        """테스트 1: StretchedExp(1, θ) 꼬리 = (ln(1/t))^{1/θ} on (0,1)"""
        tail = tail_of(StretchedExp(1.0, theta))
        for t in [1e-6, 0.01, 0.3, 0.9]:
            assert eval_tail(tail, t) == pytest.approx(math.log(1.0 / t) ** (1.0 / theta), rel=1e-13)
        assert eval_tail(tail, 1.0) == 0.0
        assert eval_tail(tail, 5.0) == 0.0

    def test_02_stretched_exp_general_c(self):
        """테스트 2: c ≠ 1 이면 ((1/c) ln(1/t))^{1/θ}"""
        tail = tail_of(StretchedExp(2.0, 0.5))
        t = 0.2
        assert eval_tail(tail, t) == pytest.approx((math.log(1.0 / t) / 2.0) ** 2.0, rel=1e-13)
        print("✅ 테스트 2 통과: 일반 c")

    def test_03_log_singular_at_zero(self):
        """테스트 3: LogSingular 꼬리 T(0) = 정의역 측도 1"""
        tail = tail_of(LogSingular())
        assert tail.value(0.0) == pytest.approx(1.0)
        assert eval_tail(tail, 2.0) == pytest.approx(math.exp(-2.0))
        print("✅ 테스트 3 통과: T(0) = 1")

    def test_04_truncated_exp(self):
        tail = tail_of(TruncatedExp())
        assert eval_tail(tail, 0.5) == pytest.approx(math.log(2.0), rel=1e-14)
        assert eval_tail(tail, 1.5) == 0.0

    def test_05_disjoint_union(self, union_spec):
        """테스트 5: 서로소 합의 꼬리 = 부분 꼬리의 합"""
        tail = tail_of(union_spec)
        assert isinstance(tail, PiecewiseSum)
        assert eval_tail(tail, 0.5) == pytest.approx(math.exp(-0.5) + math.log(2.0), rel=1e-14)
        assert eval_tail(tail, 0.5) == pytest.approx(1.2996778, abs=1e-7)
        print("✅ 테스트 5 통과: e^{-0.5} + ln 2")

    def test_06_measure_count_oracle(self):
        """테스트 6: 세밀한 x 격자 위 측도 세기와 해석적 꼬리 비교"""
        spec = StretchedExp(1.0, 2.0)
        tail = tail_of(spec)
        dx = 1e-5
        x = np.arange(dx / 2, 5.0, dx)
        f = np.exp(-x ** 2)
        for t in [0.05, 0.3, 0.7]:
            counted = float(np.count_nonzero(f > t)) * dx
            assert counted == pytest.approx(eval_tail(tail, t), abs=1e-4)

    def test_07_indicator_capped(self):
        """테스트 7: (0,1) 로 자른 e^{-x} 꼬리 = min(1, ln(1/t))"""
        tail = tail_of(Indicator01Scaled(StretchedExp(1.0, 1.0)))
        assert isinstance(tail, CappedTail)
        assert eval_tail(tail, 0.2) == pytest.approx(1.0)
        assert eval_tail(tail, 0.5) == pytest.approx(math.log(2.0), rel=1e-13)
        assert tail.crossing() == pytest.approx(math.exp(-1.0), rel=1e-10)

    @pytest.mark.parametrize("lam", [0.5, 3.0])
    def test_08_scaling(self, lam):
        """테스트 8: λ·f 의 꼬리는 T(t/λ)"""
        spec = StretchedExp(1.0, 2.0)
        scaled = tail_of(Scaled(spec, lam))
        assert isinstance(scaled, ScaledTail)
        for t in [0.01, 0.2, 0.6, 1.4]:
            assert eval_tail(scaled, t) == pytest.approx(eval_tail(tail_of(spec), t / lam), rel=1e-13)

    @pytest.mark.parametrize("spec", [
        StretchedExp(0.5, 3.0), LogSingular(), TruncatedExp(),
        Indicator01Scaled(TruncatedExp()), Scaled(LogSingular(), 2.0),
    ])
    def test_09_monotone_nonincreasing(self, spec):
        tail = tail_of(spec)
        grid = np.geomspace(1e-6, 1e2, 400)
        values = [tail.value(float(t)) for t in grid]
        assert all(b <= a * (1.0 + 1e-14) for a, b in zip(values[:-1], values[1:]))
        assert all(v >= 0 for v in values)

    def test_10_disjoint_overlap_rejected(self):
        with pytest.raises(DomainError):
            DisjointUnion((StretchedExp(1.0, 1.0), TruncatedExp()))

    def test_11_eval_tail_domain(self):
        with pytest.raises(DomainError):
            eval_tail(StretchedExpTail(1.0, 1.0), 0.0)
        with pytest.raises(DomainError):
            eval_tail(StretchedExpTail(1.0, 1.0), -1.0)


class TestEvalTail:
    """닫힌 형식 꼬리 값"""

    def test_01_stretched_exp_tail(self):
        """테스트 1: StretchedExpTail(1, 2) at t=2 → e^{-4}"""
        assert eval_tail(StretchedExpTail(1.0, 2.0), 2.0) == pytest.approx(math.exp(-4.0), rel=1e-14)

    def test_02_log_power_zero_above_one(self):
        """테스트 2: LogPowerTail(1) at t=1.5 → 0"""
        assert eval_tail(LogPowerTail(1.0), 1.5) == 0.0

    def test_03_log_power_value(self):
        """테스트 3: LogPowerTail(2) at t=e^{-4} → 2"""
        assert eval_tail(LogPowerTail(2.0), math.exp(-4.0)) == pytest.approx(2.0, rel=1e-14)
        print("✅ 테스트 3 통과: √4 = 2")

    def test_04_exponent_representation(self):
        tail = StretchedExpTail(3.0, 0.5)
        assert tail.exponent(4.0) == pytest.approx(6.0)
        assert math.isinf(LogPowerTail(1.0).exponent(2.0))


class TestTabulated:
    """표 꼬리 테스트"""

    def test_01_log_linear_interpolation(self):
        tail = Tabulated((1.0, 2.0), (1.0, 0.25))
        assert tail.value(1.5) == pytest.approx(0.5, rel=1e-14)

    def test_02_linear_through_zero(self):
        tail = Tabulated((1.0, 2.0, 3.0), (1.0, 0.5, 0.0))
        assert tail.value(2.5) == pytest.approx(0.25)

    def test_03_extrapolation_flag(self):
        tail = Tabulated((1.0, 2.0), (1.0, 0.5))
        assert tail.lookup(0.5) == (1.0, True)
        assert tail.lookup(1.0)[1] is False
        value, extrapolated = tail.lookup(3.0)
        assert extrapolated
        assert value == pytest.approx(0.25, rel=1e-14)

    def test_04_extension_past_last_node(self):
        """마지막 구간의 로그 기울기로 연장, 평탄하면 그대로, 0 이면 0"""
        t = np.geomspace(1e-3, 40.0, 400)
        tail = Tabulated(tuple(t), tuple(np.exp(-t)))
        assert tail.lookup(50.0)[0] == pytest.approx(math.exp(-50.0), rel=1e-9)
        assert tail.log_value_at_log(math.log(1e6)) == pytest.approx(-1e6, rel=1e-9)
        assert tail.lookup(1e6)[0] == 0.0

        flat = Tabulated((1.0, 2.0, 10.0), (1.0, 0.5, 0.5))
        value, extrapolated = flat.lookup(1e6)
        assert extrapolated and value == pytest.approx(0.5, rel=1e-15)
        assert math.isinf(flat.log_mass_at_log(math.log(20.0)))

        ending_at_zero = Tabulated((1.0, 2.0), (1.0, 0.0))
        assert ending_at_zero.lookup(5.0) == (0.0, True)
        assert ending_at_zero.log_mass_at_log(math.log(5.0)) == -math.inf

    def test_05_extension_mass(self):
        """연장 구간의 t|dT/dt| = t·|기울기|·T(t)"""
        tail = Tabulated((1.0, 2.0), (1.0, 0.5))
        s = math.log(3.0)
        assert tail.log_mass_at_log(s) == pytest.approx(s + math.log(0.25) + math.log(math.log(2.0)), rel=1e-12)

    def test_06_extrapolation_logged(self, caplog):
        tail = Tabulated((1.0, 2.0), (1.0, 0.5))
        with caplog.at_level("WARNING", logger="modules.function_model"):
            eval_tail(tail, 0.5)
        assert any("extrapolated" in record.getMessage() for record in caplog.records)

    @pytest.mark.parametrize("t,T", [
        ((1.0, 1.0), (1.0, 0.5)),       # t 순증가 아님
        ((1.0, 2.0), (0.5, 1.0)),       # T 증가
        ((1.0, 2.0), (1.0, -0.1)),      # 음수
        ((0.0, 1.0), (1.0, 0.5)),       # t ≤ 0
        ((1.0,), (1.0,)),               # 1점
    ])
    def test_07_validation(self, t, T):
        with pytest.raises(DomainError):
            Tabulated(t, T)


class TestGeneratingFunction:
    """생성 함수 ψ 테스트"""

    def test_01_natural_stretched_exp_p_pow(self):
        """테스트 1: NaturalStretchedExp(1,1) at p=3 → 3^{-1/3}"""
        psi = NaturalStretchedExp(1.0, 1.0)
        assert eval_psi(psi, 3.0) == pytest.approx(3.0 ** (-1.0 / 3.0), rel=1e-14)
        print("✅ 테스트 1 통과: p^{-1/p}")

    def test_02_power_psi(self):
        """테스트 2: PowerPsi(1, 2) at p=4 → 2"""
        assert eval_psi(PowerPsi(1.0, 2.0), 4.0) == pytest.approx(2.0, rel=1e-14)

    def test_03_natural_anti_subgaussian(self):
        """테스트 3: NaturalStretchedExp(1,2) at p=4 → (0.5·√π·4^{-1/2})^{1/4}"""
        expected = (0.5 * math.sqrt(math.pi) * 4.0 ** -0.5) ** 0.25
        assert eval_psi(NaturalStretchedExp(1.0, 2.0), 4.0) == pytest.approx(expected, rel=1e-13)
        assert expected == pytest.approx(0.8160, abs=2e-3)

    @pytest.mark.parametrize("p", [0.5, 1.0, 2.0, 7.0, 50.0])
    def test_04_natural_pth_power(self, p):
        """ψ(p)^p·p = 1 for e^{-x}"""
        psi = NaturalStretchedExp(1.0, 1.0)
        assert psi.value(p) ** p * p == pytest.approx(1.0, rel=1e-12)

    def test_05_outside_support_is_inf(self):
        psi = PowerPsi(1.0, 2.0, (1.0, 5.0))
        assert eval_psi(psi, 0.5) == math.inf
        assert eval_psi(psi, 5.0) == math.inf
        assert eval_psi(ConstantPsi(1.0), 3.0) == math.inf
        assert eval_psi(ConstantPsi(1.0), 1.5) == 1.0

    def test_06_nonpositive_p(self):
        with pytest.raises(DomainError):
            eval_psi(PowerPsi(1.0, 2.0), 0.0)

    def test_07_bad_support(self):
        with pytest.raises(DomainError):
            PowerPsi(1.0, 2.0, (3.0, 1.0))

    def test_08_tabulated_psi_nodes_exact(self):
        psi = TabulatedPsi((1.0, 2.0, 4.0), (1.0, 2.0 ** 0.5, 2.0))
        assert psi.value(2.0) == 2.0 ** 0.5
        # 로그-로그 선형 보간은 거듭제곱 함수를 재현
        assert psi.value(3.0) == pytest.approx(3.0 ** 0.5, rel=1e-12)
        assert psi.value(0.5) == math.inf
        assert psi.in_support(1.0) and psi.in_support(4.0)

    def test_09_tabulated_psi_validation(self):
        with pytest.raises(DomainError):
            TabulatedPsi((1.0, 2.0), (1.0, 0.0))
        with pytest.raises(DomainError):
            TabulatedPsi((2.0, 1.0), (1.0, 1.0))

    def test_10_natural_source(self):
        psi = NaturalStretchedExp(2.0, 0.5)
        assert psi.natural_source == StretchedExp(2.0, 0.5)
        assert PowerPsi(1.0, 1.0).natural_source is None


class TestSerialization:
    """JSON 사전 직렬화"""

    @pytest.mark.parametrize("spec", [
        StretchedExp(0.5, 2.0),
        LogSingular(),
        Indicator01Scaled(StretchedExp(1.0, 3.0)),
        DisjointUnion((LogSingular(), TruncatedExp())),
        Scaled(TruncatedExp(), 4.0),
    ])
    def test_01_spec_round_trip(self, spec):
        assert spec_from_dict(spec.to_dict()) == spec

    @pytest.mark.parametrize("tail", [
        StretchedExpTail(1.0, 2.0),
        LogPowerTail(2.0, 0.5),
        PiecewiseSum((StretchedExpTail(1.0, 1.0), LogPowerTail(1.0))),
        ScaledTail(LogPowerTail(1.0), 2.0),
        CappedTail(LogPowerTail(1.0), 1.0),
    ])
    def test_02_tail_round_trip(self, tail):
        assert tail_from_dict(tail.to_dict()) == tail

    def test_03_tabulated_round_trip(self):
        tail = Tabulated((1.0, 2.0, 3.0), (1.0, 0.5, 0.1))
        restored = tail_from_dict(tail.to_dict())
        assert restored.t == tail.t and restored.T == tail.T

    def test_04_psi_support_inf(self):
        psi = psi_from_dict({"family": "power_psi", "C1": 1, "m": 2, "support": [1, "inf"]})
        assert psi.support == (1.0, math.inf)
        assert psi_from_dict(psi.to_dict()) == psi

    def test_05_source_dispatch(self):
        assert isinstance(source_from_dict({"family": "stretched_exp_tail", "C": 1, "m": 2}),
                          StretchedExpTail)
        assert isinstance(source_from_dict({"family": "log_singular"}), LogSingular)

    def test_06_unknown_family(self):
        with pytest.raises(SpecParseError):
            spec_from_dict({"family": "gaussian_mixture"})

    def test_07_missing_field(self):
        with pytest.raises(SpecParseError):
            spec_from_dict({"family": "stretched_exp", "c": 1.0})

    def test_08_invalid_value_is_domain_error(self):
        with pytest.raises(DomainError):
            spec_from_dict({"family": "stretched_exp", "c": -1.0, "theta": 2.0})

    def test_09_not_an_object(self):
        with pytest.raises(SpecParseError):
            spec_from_dict(["stretched_exp"])


if __name__ == "__main__":
    pytest.main([__file__, "-v", "-s"])
