//! Residual checks for the standard form, the dual action on the commutant and the
//! grading of `H`.

use super::GnsRealization;
use crate::numsub::{identity, unit, CMatrix, CVector, Subspace, C64};
use crate::report::Check;

/// Angles used wherever an identity must hold for every `z ∈ T`.
const SAMPLE_ANGLES: [f64; 4] = [0.7, 2.1, 3.9, 5.3];

fn samples() -> impl Iterator<Item = C64> {
    SAMPLE_ANGLES.iter().map(|&t| unit(t))
}

fn orbit_span(g: &GnsRealization, ops: &[CMatrix]) -> Subspace {
    let vectors: Vec<CVector> = ops.iter().map(|x| x * g.xi0()).collect();
    Subspace::span(&vectors, g.dim(), *g.tol()).expect("ambient")
}

/// Every identity of the standard form, one record each.
pub fn verify_standard_identities(g: &GnsRealization) -> Vec<Check> {
    let tol = g.tol().residual_tol;
    let k = g.dim();
    let id = identity(k);
    let md = g.modular();
    let basis = g.basis().to_vec();
    let reps: Vec<CMatrix> = basis.iter().map(|b| g.rep(b).expect("basis")).collect();
    let coms: Vec<CMatrix> = g.commutant_algebra().basis();
    let spectrum = g.system().arveson_spectrum();
    let spread = 2 * g.system().action().spread();
    let mut out = Vec::new();

    // representation
    let mut hom = 0.0f64;
    for (a, ra) in basis.iter().zip(&reps) {
        hom = hom.max((g.rep(&a.adjoint()).expect("adjoint") - ra.adjoint()).norm());
        for (b, rb) in basis.iter().zip(&reps) {
            let rab = g.rep(&(a * b)).expect("product");
            hom = hom.max((rab - ra * rb).norm());
        }
    }
    let d = g.system().ambient_dim();
    hom = hom.max((g.rep(&identity(d)).expect("unit") - &id).norm());
    out.push(Check::below(
        "standard-form.rep-homomorphism",
        hom,
        tol,
        "rep is a unital *-homomorphism on basis products",
    ));

    let mut vs = 0.0f64;
    for (b, rb) in basis.iter().zip(&reps) {
        let v = g.inner(&(rb * g.xi0()), g.xi0());
        vs = vs.max((v - g.state().eval(b)).norm());
    }
    out.push(Check::below(
        "standard-form.vector-state",
        vs,
        tol,
        "<rep(m) xi0, xi0> = phi(m)",
    ));

    let cyclic = orbit_span(g, &reps);
    out.push(Check::below(
        "standard-form.cyclic",
        cyclic
            .distance(&Subspace::full(k, *g.tol()))
            .expect("ambient"),
        tol,
        format!("dim rep(M) xi0 = {} of {k}", cyclic.dim()),
    ));
    let separating = orbit_span(g, &coms);
    out.push(Check::below(
        "standard-form.separating",
        separating
            .distance(&Subspace::full(k, *g.tol()))
            .expect("ambient"),
        tol,
        format!("dim M' xi0 = {} of {k}", separating.dim()),
    ));

    let mut comm = 0.0f64;
    for ra in &reps {
        for c in &coms {
            comm = comm.max((ra * c - c * ra).norm());
        }
    }
    out.push(Check::below(
        "standard-form.commutant-commutes",
        comm,
        tol,
        "rep(M) and M' commute elementwise",
    ));

    // modular operators
    let mut s_orbit = 0.0f64;
    for b in &basis {
        let lhs = md.s.apply(&g.vector(b).expect("basis"));
        s_orbit = s_orbit.max((lhs - g.vector(&b.adjoint()).expect("adjoint")).norm());
    }
    out.push(Check::below(
        "modular.s-on-orbit",
        s_orbit,
        tol,
        "S(a xi0) = a* xi0",
    ));
    let mut f_orbit = 0.0f64;
    for c in &coms {
        let lhs = md.f.apply(&(c * g.xi0()));
        f_orbit = f_orbit.max((lhs - c.adjoint() * g.xi0()).norm());
    }
    out.push(Check::below(
        "modular.f-on-commutant-orbit",
        f_orbit,
        tol,
        "the adjoint of S sends m' xi0 to m'* xi0",
    ));
    let delta_res = (md.f.compose(&md.s) - &md.delta).norm()
        + (&md.delta * &md.delta_inv - &id).norm()
        + (md.s.compose(&md.f) - &md.delta_inv).norm();
    let min_eig = crate::numsub::hermitian_eigen(&md.delta).0[0];
    out.push(Check::below(
        "modular.delta",
        if min_eig > 0.0 {
            delta_res
        } else {
            f64::INFINITY
        },
        tol,
        format!("Delta = S*S, inverse S S*, smallest eigenvalue {min_eig:.3e}"),
    ));
    out.push(Check::below(
        "modular.polar",
        md.polar_residual(),
        tol,
        "S = J Delta^(1/2)",
    ));
    out.push(Check::below(
        "modular.j-involution",
        md.involution_residual().max(md.isometry_residual()),
        tol,
        "J is an isometric conjugate-linear involution",
    ));
    let jmj: Vec<CMatrix> = reps.iter().map(|r| md.j.sandwich(r)).collect();
    let jmj = crate::numsub::orthonormalize(&jmj, (k, k), g.tol()).expect("shape");
    out.push(Check::below(
        "modular.j-conjugates-algebra",
        jmj.compare(g.commutant_algebra().space())
            .expect("shape")
            .distance,
        tol,
        "J rep(M) J = M'",
    ));

    // implementing unitaries and the dual action
    let mut cov = 0.0f64;
    let mut comm_s = 0.0f64;
    let mut inv = 0.0f64;
    let mut intertwine = 0.0f64;
    let mut orbit = 0.0f64;
    let mut group = 0.0f64;
    let zs: Vec<C64> = samples().collect();
    for &z in &zs {
        let u = g.implementing_unitary(z).expect("unimodular");
        cov = cov.max((&u * u.adjoint() - &id).norm());
        cov = cov.max((&u * g.xi0() - g.xi0()).norm());
        for (b, rb) in basis.iter().zip(&reps) {
            let alpha = g.system().act(z, b).expect("unimodular");
            cov = cov.max((&u * rb * u.adjoint() - g.rep(&alpha).expect("invariant")).norm());
            let lhs = md.j.sandwich(&g.rep(&alpha).expect("invariant"));
            let rhs = &u * md.j.sandwich(rb) * u.adjoint();
            intertwine = intertwine.max((lhs - rhs).norm());
        }
        comm_s = comm_s
            .max(md.s.commutation_residual(&u))
            .max(md.f.commutation_residual(&u))
            .max(md.j.commutation_residual(&u));
        for c in &coms {
            let moved = &u * c * u.adjoint();
            inv = inv.max(g.commutant_algebra().residual(&moved).expect("shape"));
            orbit = orbit.max((&u * (c * g.xi0()) - &moved * g.xi0()).norm());
            for &w in &zs {
                let uw = g.implementing_unitary(w).expect("unimodular");
                let uzw = g.implementing_unitary(z * w).expect("unimodular");
                let lhs = &u * (&uw * c * uw.adjoint()) * u.adjoint();
                group = group.max((lhs - &uzw * c * uzw.adjoint()).norm());
            }
        }
    }
    out.push(Check::below(
        "implementing-unitary.covariance",
        cov,
        tol,
        "U_z unitary, U_z xi0 = xi0, U_z rep(m) U_z* = rep(alpha_z(m))",
    ));
    out.push(Check::below(
        "commutant-action.invariant",
        inv.max(group),
        tol,
        "U_z M' U_z* = M' and z -> alpha'_z is a group action",
    ));
    out.push(Check::below(
        "commutant-action.j-commutes",
        comm_s,
        tol,
        "U_z commutes with S, F and J",
    ));
    out.push(Check::below(
        "commutant-action.j-intertwines",
        intertwine,
        tol,
        "J rep(alpha_z(m)) J = alpha'_z(J rep(m) J)",
    ));
    out.push(Check::below(
        "commutant-action.orbit",
        orbit,
        tol,
        "U_z(m' xi0) = alpha'_z(m') xi0",
    ));

    // grading of M' and H
    let mut jconj = 0.0f64;
    let mut dims_ok = true;
    let mut dims = Vec::new();
    let mut orth = 0.0f64;
    let mut m_orbit = 0.0f64;
    let mut c_orbit = 0.0f64;
    let mut total = CMatrix::zeros(k, k);
    let mut dim_total = 0;
    let projections: Vec<(i64, CMatrix)> =
        (-spread..=spread).map(|n| (n, g.h_projection(n))).collect();
    for (n, p) in &projections {
        let n = *n;
        let cn = g.commutant_spectral_subspace(n);
        let jm: Vec<CMatrix> = g
            .rep_spectral_subspace(-n)
            .elements()
            .iter()
            .map(|r| md.j.sandwich(r))
            .collect();
        let jm = crate::numsub::orthonormalize(&jm, (k, k), g.tol()).expect("shape");
        jconj = jconj.max(cn.compare(&jm).expect("shape").distance);

        orth = orth.max((p * p - p).norm()).max((p - p.adjoint()).norm());
        total += p;
        let hn = Subspace::from_columns_scaled(p, *g.tol(), 1.0);
        dim_total += hn.dim();
        let mn = g.system().spectral_subspace(n);
        let mrep: Vec<CMatrix> = mn.map(|m| g.rep(m).expect("member"));
        m_orbit = m_orbit.max(orbit_span(g, &mrep).distance(&hn).expect("ambient"));
        c_orbit = c_orbit.max(
            orbit_span(g, &cn.elements())
                .distance(&hn)
                .expect("ambient"),
        );
        if hn.dim() != mn.dim() || hn.dim() != cn.dim() {
            dims_ok = false;
        }
        if hn.dim() > 0 {
            dims.push(format!("{n}:{}", hn.dim()));
        }
    }
    for (i, (n, p)) in projections.iter().enumerate() {
        for (m, q) in &projections[i + 1..] {
            debug_assert_ne!(n, m);
            orth = orth.max((p * q).norm());
        }
    }
    out.push(Check::below(
        "commutant-grading.j-conjugate",
        jconj,
        tol,
        "(M')_n = J M_(-n) J",
    ));
    let sp_prime = g.commutant_spectrum();
    out.push(Check::flag(
        "commutant-grading.spectrum",
        sp_prime == spectrum,
        format!("sp(alpha) = {spectrum:?}, sp(alpha') = {sp_prime:?}"),
    ));
    out.push(Check::below(
        "hilbert-grading.orthogonal",
        orth,
        tol,
        "P_n^H are orthogonal projections with P_n P_k = 0",
    ));
    out.push(Check::below(
        "hilbert-grading.algebra-orbit",
        m_orbit,
        tol,
        "M_n xi0 spans H_n",
    ));
    out.push(Check::below(
        "hilbert-grading.commutant-orbit",
        c_orbit,
        tol,
        "(M')_n xi0 spans H_n",
    ));
    let complete = if dim_total == k {
        (total - &id).norm()
    } else {
        f64::INFINITY
    };
    out.push(Check::below(
        "hilbert-grading.complete",
        complete,
        tol,
        format!("sum of dim H_n = {dim_total}, dim H = {k}"),
    ));
    out.push(Check::flag(
        "hilbert-grading.dimensions",
        dims_ok,
        format!("dim H_n = dim M_n = dim (M')_n: {}", dims.join(" ")),
    ));
    out
}
