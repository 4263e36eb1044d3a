import numpy as np
import pytest

from recoupler import (
    ANTISYMMETRIC,
    SYMMETRIC,
    CodeSpec,
    LogicalGate,
    cost_report,
    fidelity,
    identity_suite,
    preset_model,
    verify_circuit,
    verify_gate,
)

XXZ = preset_model("electrons_on_helium", 4)
SPEC = CodeSpec(SYMMETRIC, 4)


class TestFidelity:
    def test_identity(self):
        assert fidelity(np.eye(16), np.eye(4), SPEC) == pytest.approx(1.0)

    def test_orthogonal_paulis(self):
        from recoupler import code_isometry

        v = code_isometry(SPEC)
        z = np.kron(np.eye(2), np.diag([1.0, -1.0]))
        u = v @ z @ v.conj().T + (np.eye(16) - v @ v.conj().T)
        x = np.kron(np.eye(2), np.array([[0, 1], [1, 0]]))
        assert fidelity(u, x.astype(complex), SPEC) == pytest.approx(0.0, abs=1e-14)

    def test_global_phase_invariance(self):
        rng = np.random.default_rng(51)
        z = rng.normal(size=(16, 16)) + 1j * rng.normal(size=(16, 16))
        q, _ = np.linalg.qr(z)
        tgt = np.linalg.qr(rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)))[0]
        base = fidelity(q, tgt, SPEC)
        for phi in np.linspace(0, 2 * np.pi, 8, endpoint=False):
            assert abs(fidelity(np.exp(1j * phi) * q, tgt, SPEC) - base) < 1e-12

    def test_bounded_by_one(self):
        rng = np.random.default_rng(52)
        for _ in range(10):
            q, _ = np.linalg.qr(rng.normal(size=(16, 16)) + 1j * rng.normal(size=(16, 16)))
            tgt, _ = np.linalg.qr(rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)))
            assert fidelity(q, tgt, SPEC) <= 1 + 1e-12


class TestVerifyGate:
    def test_rx_passes(self):
        rep = verify_gate(LogicalGate("rx", (1,), (np.pi,)), XXZ)
        assert rep.passed
        assert rep.step_count_serial == 1 and rep.step_count_parallel == 1
        assert rep.mode == "ideal"

    def test_cphase_xy_passes_with_five_steps(self):
        rep = verify_gate(LogicalGate("cphase", (1, 2)), preset_model("quantum_hall", 4))
        assert rep.passed
        assert rep.step_count_serial == 5 and rep.step_count_parallel == 5

    def test_degenerate_rz_fails_with_reason(self):
        m = preset_model("electrons_on_helium", 4, epsilon=(1.0, 1.0, 1.5, 1.0))
        rep = verify_gate(LogicalGate("rz", (1,), (np.pi / 2,)), m)
        assert not rep.passed
        assert "DegenerateSpectrumError" in rep.reason

    def test_realistic_mode_labels_and_converges(self):
        gate = LogicalGate("rz", (1,), (0.7,))
        fids = []
        for r in (10.0, 1e3, 1e5):
            rep = verify_gate(gate, XXZ, mode="realistic", ratio=r)
            assert rep.mode == f"realistic(r={r:g})"
            fids.append(rep.fidelity)
        assert fids[0] < fids[1] < fids[2]
        assert fids[1] >= 0.999  # two logical qubits at r = 1e3
        assert fids[2] > 1 - 1e-4

    def test_verify_circuit(self):
        gates = [LogicalGate("rx", (1,), (0.7,)), LogicalGate("cphase", (1, 2))]
        rep = verify_circuit(gates, XXZ)
        assert rep.passed
        assert rep.step_count_parallel == 5

    def test_report_dict_shape(self):
        rep = verify_gate(LogicalGate("rx", (1,), (1.0,)), XXZ)
        d = rep.to_dict()
        assert set(d) == {
            "gate", "fidelity", "leakage", "step_count_serial", "step_count_parallel",
            "mode", "tol_fidelity", "tol_leakage", "pass", "reason",
        }


class TestIdentitySuite:
    def test_all_entries_pass(self):
        entries = identity_suite()
        names = {e.name for e in entries}
        assert {
            "conjugation_sign_flip",
            "nmr_z_rotation",
            "nmr_ising_recoupling",
            "encoded_zz_action",
            "xy_nnn_conjugation",
            "xy_composite_generator",
            "encoded_sign_flip",
            "heis_zz_conjugation",
            "heis_zz_extraction",
            "delta_code_triviality",
            "tr_commutation",
            "xy_cphase_perturbation",
        } <= names
        for e in entries:
            assert e.passed, f"{e.name}: residual {e.residual}"

    def test_identities_are_tight(self):
        for e in identity_suite():
            if e.require == "below":
                assert e.residual <= 1e-10

    def test_sensitivity_entry_requires_large_residual(self):
        entry = {e.name: e for e in identity_suite()}["xy_cphase_perturbation"]
        assert entry.require == "above"
        assert entry.residual > 1e-3


class TestCostReport:
    def test_xxz_rows(self):
        rows = {r["gate"]: r for r in cost_report(XXZ)}
        assert rows["rx"]["serial"] == 1
        assert rows["rz"]["serial"] == 4
        assert rows["euler"]["serial"] <= 6
        assert rows["cphase"]["serial"] == 6 and rows["cphase"]["parallel"] == 4
        assert all(r["match"] for r in rows.values())

    def test_xy_row(self):
        rows = {r["gate"]: r for r in cost_report(preset_model("quantum_hall", 4))}
        assert rows["cphase"]["serial"] == 5 and rows["cphase"]["parallel"] == 5

    def test_heisenberg_rows_and_literature(self):
        rows = {r["gate"]: r for r in cost_report(preset_model("spin_dots", 4))}
        assert rows["heis_zz"]["serial"] == 6
        lit = rows["isotropic_zz_3spin_encoding"]
        assert lit["serial"] == 19 and lit["parallel"] == 7
        assert "literature" in lit["note"]

    def test_antisymmetric_sector_rows(self):
        rows = {
            r["gate"]: r
            for r in cost_report(preset_model("xxz_antisymmetric", 4), sector=ANTISYMMETRIC)
        }
        assert rows["rx"]["serial"] == 1 and rows["cphase"]["parallel"] == 4

    def test_serial_counts_scale_with_register(self):
        rows = {r["gate"]: r for r in cost_report(preset_model("electrons_on_helium", 6))}
        assert rows["rz"]["serial"] == 6 and rows["rz"]["parallel"] == 4
        assert rows["euler"]["serial"] <= 8
        assert all(r["match"] for r in rows.values())


class TestMonotoneConvergence:
    @pytest.mark.parametrize(
        "gate",
        [
            LogicalGate("rx", (1,), (1.1,)),
            LogicalGate("rz", (1,), (0.7,)),
            LogicalGate("euler", (1,), (0.5, 1.2, -0.8)),
            LogicalGate("cphase", (1, 2)),
        ],
        ids=lambda g: g.kind,
    )
    def test_every_gate_converges(self, gate):
        fids = [
            verify_gate(gate, XXZ, mode="realistic", ratio=10.0**k).fidelity
            for k in range(1, 6)
        ]
        for lo, hi in zip(fids, fids[1:]):
            assert hi >= lo - 1e-6
        assert fids[-1] >= 1 - 1e-4
