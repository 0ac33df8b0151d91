// Copyright 2026 qhpc Contributors
// SPDX-License-Identifier: Apache-2.0

use num_complex::Complex64;
use qhpc_core::twin::{
    ghz_circuit, Circuit, Gate, MetricSet, Nominal, OutputFormat, QpuTwin, ResultData, TwinConfig,
};
use qhpc_core::RngStream;

fn twin(f: f64) -> QpuTwin {
    let mut cfg = TwinConfig::default();
    cfg.nominal = Nominal { f1q: f, f_ro: f, f_cz: f };
    cfg.drift.floor_offset = 0.0;
    QpuTwin::new(cfg).unwrap()
}

fn within_3_sigma(count: u64, n: u64, p: f64) -> bool {
    let sigma = (p * (1.0 - p) / n as f64).sqrt().max(1e-12);
    ((count as f64 / n as f64) - p).abs() <= 3.0 * sigma
}

type M2 = [[Complex64; 2]; 2];

fn mul(a: &M2, b: &M2) -> M2 {
    let mut o = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                o[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    o
}

fn dagger(a: &M2) -> M2 {
    [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
}

/// `ρ → UρU†`, then the single-qubit depolarizing channel with Pauli
/// probability `p`, then a readout that flips with probability `r`.
fn oracle_p1(theta: f64, phi: f64, p: f64, r: f64) -> f64 {
    let c = Complex64::new((theta / 2.0).cos(), 0.0);
    let s = (theta / 2.0).sin();
    let i = Complex64::new(0.0, 1.0);
    let u: M2 = [[c, -i * Complex64::from_polar(s, -phi)], [-i * Complex64::from_polar(s, phi), c]];
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let rho0: M2 = [[one, zero], [zero, zero]];
    let rho = mul(&mul(&u, &rho0), &dagger(&u));
    let x: M2 = [[zero, one], [one, zero]];
    let y: M2 = [[zero, -i], [i, zero]];
    let z: M2 = [[one, zero], [zero, -one]];
    let mut out = [[zero; 2]; 2];
    for (w, m) in [(1.0 - p, None), (p / 3.0, Some(x)), (p / 3.0, Some(y)), (p / 3.0, Some(z))] {
        let term = match m {
            None => rho,
            Some(m) => mul(&mul(&m, &rho), &dagger(&m)),
        };
        for a in 0..2 {
            for b in 0..2 {
                out[a][b] += term[a][b] * w;
            }
        }
    }
    let p1 = out[1][1].re;
    p1 * (1.0 - r) + (1.0 - p1) * r
}

fn ones(result: &qhpc_core::twin::JobResult) -> u64 {
    result.histogram().unwrap().get("1").copied().unwrap_or(0)
}

#[test]
fn noiseless_ghz_gives_two_bitstrings() {
    let t = twin(1.0);
    let chain: Vec<usize> = t.topology().snake().into_iter().take(5).collect();
    let c = ghz_circuit(&chain, 20, 10_000);
    let r = t.execute(&c, OutputFormat::Histogram, &mut RngStream::new(1, "ghz")).unwrap();
    let h = r.histogram().unwrap();
    assert_eq!(h.len(), 2, "{h:?}");
    assert!(within_3_sigma(h["00000"], 10_000, 0.5));
    assert!(within_3_sigma(h["11111"], 10_000, 0.5));
}

#[test]
fn depolarizing_and_readout_match_density_matrix() {
    let n = 40_000;
    for (k, (theta, phi, f1q, fro)) in
        [(0.0, 0.0, 0.9, 1.0), (1.1, 0.3, 0.85, 1.0), (2.0, 1.0, 1.0, 0.93), (0.7, -0.5, 0.9, 0.95)].into_iter().enumerate()
    {
        let mut t = twin(0.99);
        let mut m = t.calibration().values.clone();
        m.f1q[0] = f1q;
        m.f_ro[0] = fro;
        t.set_calibration(m).unwrap();
        let c = Circuit::new(1, n).with_gates([Gate::Prx { qubit: 0, theta, phi }, Gate::Measure { qubit: 0 }]);
        let r = t.execute(&c, OutputFormat::Histogram, &mut RngStream::new(k as u64, "dm")).unwrap();
        let want = oracle_p1(theta, phi, 1.0 - f1q, 1.0 - fro);
        assert!(within_3_sigma(ones(&r), n as u64, want), "case {k}: {} vs {want}", ones(&r) as f64 / n as f64);
    }
}

#[test]
fn bitstrings_agree_with_histogram_statistics() {
    let mut t = twin(0.99);
    let mut m: MetricSet = t.calibration().values.clone();
    m.f_ro[0] = 0.8;
    t.set_calibration(m).unwrap();
    let c = Circuit::new(1, 20_000).with_gates([Gate::Measure { qubit: 0 }]);
    let r = t.execute(&c, OutputFormat::RawBitstrings, &mut RngStream::new(4, "bits")).unwrap();
    let ResultData::RawBitstrings(bits) = &r.data else { panic!() };
    let k = bits.iter().filter(|b| b.as_str() == "1").count() as u64;
    assert!(within_3_sigma(k, 20_000, 0.2));
}

#[test]
fn iq_threshold_recovers_readout_fidelity() {
    let n = 20_000u32;
    for (prep_one, fro) in [(false, 0.93), (true, 0.97)] {
        let mut t = twin(1.0);
        let mut m = t.calibration().values.clone();
        m.f_ro[3] = fro;
        t.set_calibration(m).unwrap();
        let mut c = Circuit::new(4, n);
        if prep_one {
            c.push(Gate::Prx { qubit: 3, theta: std::f64::consts::PI, phi: 0.0 });
        }
        c.push(Gate::Measure { qubit: 3 });
        let r = t.execute(&c, OutputFormat::RawIq, &mut RngStream::new(9, "iq")).unwrap();
        let ResultData::RawIq(iq) = &r.data else { panic!() };
        let correct = iq.iter().filter(|shot| (shot[0].0 > 0.0) == prep_one).count() as u64;
        assert!(within_3_sigma(correct, n as u64, fro), "{}", correct as f64 / n as f64);
    }
}

#[test]
fn recorded_shots_match_request() {
    let t = twin(0.99);
    let c = Circuit::new(2, 123).with_gates([Gate::Cz { a: 0, b: 1 }]).measure_all();
    for fmt in [OutputFormat::Histogram, OutputFormat::RawBitstrings, OutputFormat::RawIq] {
        let r = t.execute(&c, fmt, &mut RngStream::new(0, "shots")).unwrap();
        assert_eq!(r.recorded_shots(), 123);
    }
}
