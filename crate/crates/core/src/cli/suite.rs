//! Replays every identity on the objects of an instance, each one through two
//! independent computations.
//!
//! s2: norm identities (free-space duality, the three `LipL` formulas, the
//!     linearization, `δ_X ⊠ v`, two-Lipschitz tables).
//! s3: integral norms (LP duality, representation, factorization).
//! s4: dominated and Lipschitz summing norms.

use super::instance::Instance;
use super::report::{Check, Value};
use crate::config::Caps;
use crate::error::Result;
use crate::integral::{eps_dual_check, factorize_linfty, integral_norm, reconstruct};
use crate::linalg::{self, Vector};
use crate::operators::{
    associate_tr, blip_norm, bt_norm, delta_box, from_two_lipschitz, injective_norm, linearization_norm, lip_norm,
    lip_of_table, lipl_norm, projective_norm, restrict_two_lipschitz, LipLinearOperator, LipschitzMap,
};
use crate::rational::{self, int, Bounds, Rational};
use crate::spaces::{delta, free_norm, lip_constant, lipschitz_ball_vertices, FiniteMetricSpace};
use crate::summing::{
    dominated_lower_bound, dominated_two_measure, dominated_via_a, dominated_via_b, lipschitz_p_summing,
    verify_certificate, DominatedResult, DominationCertificate, Subject, SummingOptions,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Suites {
    pub s2: bool,
    pub s3: bool,
    pub s4: bool,
}

impl Suites {
    pub const ALL: Suites = Suites { s2: true, s3: true, s4: true };
}

struct Run<'a> {
    caps: &'a Caps,
    opts: SummingOptions,
    checks: Vec<Check>,
    prefix: &'a str,
}

impl Run<'_> {
    fn push(&mut self, suite: &str, subject: &str, c: Check) {
        let subject = if self.prefix.is_empty() { subject.to_string() } else { format!("{}/{subject}", self.prefix) };
        self.checks.push(c.about(suite, &subject));
    }

    fn certificate(
        &mut self,
        suite: &str,
        subject: &str,
        what: &str,
        cert: &DominationCertificate,
        s: Subject<'_>,
    ) -> Result<()> {
        let v = verify_certificate(cert, s)?;
        let detail = v.violation.unwrap_or_else(|| format!("{} constraints", v.checked));
        self.push(suite, subject, Check::certificate(what, v.passed && v.exhaustive, Some(detail)));
        Ok(())
    }

    fn dominated(&mut self, subject: &str, t: &LipLinearOperator, r: &DominatedResult) -> Result<()> {
        let route = format!("route {:?} certificate", r.route);
        if let Some((targets, cert)) = &r.lipschitz {
            self.certificate("s4", subject, &route, cert, Subject::Distances { space: &t.space, targets })?;
        }
        for (target, cert) in &r.linear {
            self.certificate("s4", subject, &route, cert, Subject::Linear(target))?;
        }
        Ok(())
    }

    fn space(&mut self, name: &str, s: &FiniteMetricSpace) -> Result<()> {
        let verts = lipschitz_ball_vertices(s, self.caps)?;
        // every molecule plus the sum of all point masses
        let mut ms: Vec<Vector> = s.pairs().map(|(x, y)| linalg::sub(&delta(s, x), &delta(s, y))).collect();
        ms.push((0..s.free_dim()).map(|_| rational::one()).collect());
        for m in &ms {
            let lp = free_norm(m, s)?;
            let vmax = verts.iter().map(|f| linalg::dot(f, m)).max().unwrap_or_else(rational::zero);
            if lp != vmax {
                self.push(
                    "s2",
                    name,
                    Check::equality("free norm: transport LP = max over Lipschitz vertices", &lp, &vmax),
                );
                return Ok(());
            }
        }
        let c = Check::certificate(
            "free norm: transport LP = max over Lipschitz vertices",
            true,
            Some(format!("{} free vectors", ms.len())),
        );
        self.push("s2", name, c);
        Ok(())
    }

    fn operator_s2(&mut self, name: &str, t: &LipLinearOperator) -> Result<()> {
        let v = lipl_norm(t)?;
        self.push("s2", name, Check::equality("LipL = Lip of the point table", &v, &lip_of_table(t)?));
        self.push("s2", name, Check::equality("LipL = norm of the column operator", &v, &bt_norm(t)?));
        self.push("s2", name, Check::equality("LipL = norm of the linearization", &v, &linearization_norm(t)?));
        Ok(())
    }

    fn operator_s3(&mut self, name: &str, t: &LipLinearOperator) -> Result<()> {
        let res = integral_norm(t, self.caps)?;
        let back = reconstruct(&res.certificate, &t.space, &t.domain, &t.codomain)?;
        self.push(
            "s3",
            name,
            Check::certificate("integral representation reproduces the operator", back.table() == t.table(), None),
        );
        let tv = res.certificate.total_variation(&t.codomain);
        self.push(
            "s3",
            name,
            Check::equality("integral norm = total variation of its representation", &res.value, &tv),
        );
        self.push("s3", name, Check::bound("LipL <= integral norm", &lipl_norm(t)?, &res.value));
        if t.is_scalar() {
            let dual = eps_dual_check(t, self.caps)?;
            self.push(
                "s3",
                name,
                Check::equality("integral norm = dual program over the ε-tensor ball", &res.value, &dual),
            );
            let fac = factorize_linfty(&res.certificate, &t.space, &t.domain)?;
            self.push("s3", name, Check::bound("integral norm <= L∞ factorization product", &res.value, &fac.product));
        }
        Ok(())
    }

    fn operator_s4(&mut self, name: &str, t: &LipLinearOperator) -> Result<Rational> {
        let (one, two) = (int(1), int(2));
        let a = dominated_via_a(t, &one, &one, self.caps, &self.opts)?;
        let b = dominated_via_b(t, &one, &one, self.caps, &self.opts)?;
        self.dominated(name, t, &a)?;
        self.dominated(name, t, &b)?;
        // Each route is a lower bound for the (1,1)-dominated constant; the
        // two-measure search certifies an upper bound. The routes coincide
        // when either factor is one-dimensional, and can differ otherwise.
        let delta = dominated_two_measure(t, self.caps, &self.opts)?;
        self.certificate("s4", name, "two-measure certificate", &delta.certificate, Subject::Operator(t))?;
        let detail = match (a.value == b.value, delta.exact) {
            (true, true) => "routes agree and the constant is attained".to_string(),
            (true, false) => format!("routes agree; constant in {}", delta.value),
            (false, _) => format!("routes differ: A = {}, B = {}; constant in {}", a.value, b.value, delta.value),
        };
        for (r, label) in [(&a, "A"), (&b, "B")] {
            let c =
                Check::bound(&format!("(1,1) route {label} <= certified constant"), &r.value.lower, &delta.value.upper);
            self.push("s4", name, c.detail(detail.clone()));
        }
        if t.domain.dim() == 1 || t.space.free_dim() == 1 {
            self.push(
                "s4",
                name,
                Check::equality("(1,1) route A = route B", &a.value, &b.value).detail("one factor is one-dimensional"),
            );
        }
        let a2 = dominated_via_a(t, &one, &two, self.caps, &self.opts)?;
        self.dominated(name, t, &a2)?;
        // π_2 <= π_1 pair by pair, and π_1^L is monotone in its targets
        self.push("s4", name, Check::bound("(1,2) route A <= (1,1) route A", &a2.value.lower, &a.value.upper));
        Ok(delta.value.upper)
    }

    fn map(&mut self, name: &str, r: &LipschitzMap) -> Result<()> {
        let t = associate_tr(r);
        self.push(
            "s2",
            name,
            Check::equality("Lip(R) = LipL of the associated operator", &lip_norm(r)?, &lipl_norm(&t)?),
        );
        let res = integral_norm(&t, self.caps)?;
        self.push(
            "s3",
            name,
            Check::bound("Lip(R) <= integral norm of the associated operator", &lip_norm(r)?, &res.value),
        );
        if let Some((f, z)) = rank_one(r) {
            let expect = lip_constant(&r.space, &f) * r.codomain.eval(&z);
            self.push("s3", name, Check::equality("rank one: integral norm = Lip(f)·‖z‖", &res.value, &expect));
        }
        let one = int(1);
        let ps = lipschitz_p_summing(r, &one, self.caps)?;
        self.certificate("s4", name, "Lipschitz 1-summing certificate", &ps.certificate, Subject::Map(r))?;
        let a = dominated_via_a(&t, &one, &one, self.caps, &self.opts)?;
        let c = Check::equality(
            "Lipschitz 1-summing = (1,1) route A of the associated form",
            Value::from(&ps.value),
            Value::from(&a.value),
        );
        self.push("s4", name, c);
        // The dominated constant of T_R can exceed π_1^L(R); only the inequality holds.
        let delta = dominated_two_measure(&t, self.caps, &self.opts)?;
        self.certificate(
            "s4",
            name,
            "two-measure certificate of the associated form",
            &delta.certificate,
            Subject::Operator(&t),
        )?;
        let detail = if Bounds::exact(ps.value.upper.clone()) == delta.value {
            "equal".to_string()
        } else {
            format!("dominated constant of the associated form in {}", delta.value)
        };
        let c = Check::bound(
            "Lipschitz 1-summing <= certified dominated constant of the associated form",
            &ps.value.lower,
            &delta.value.upper,
        );
        self.push("s4", name, c.detail(detail));
        Ok(())
    }
}

/// `R(x) = f(x)·z` when every value is a multiple of one vector.
fn rank_one(r: &LipschitzMap) -> Option<(Vector, Vector)> {
    let z = r.values().iter().find(|v| !linalg::is_zero(v))?.clone();
    let k = z.iter().position(|c| !num::Zero::is_zero(c))?;
    let f: Vector = r.values().iter().map(|v| &v[k] / &z[k]).collect();
    let parallel = r.values().iter().zip(&f).all(|(v, c)| *v == linalg::scale(&z, c));
    parallel.then_some((f, z))
}

/// Runs the selected suites on every object of every instance. `prefix`
/// tags subjects when several instances are checked together.
pub fn verify_suite(instances: &[(String, Instance)], suites: Suites, caps: &Caps) -> Result<Vec<Check>> {
    let mut all = Vec::new();
    for (prefix, inst) in instances {
        let mut run = Run { caps, opts: SummingOptions::default(), checks: Vec::new(), prefix };
        for (name, s) in &inst.spaces {
            if suites.s2 {
                run.space(name, s)?;
            }
        }
        let mut constants = std::collections::BTreeMap::new();
        for (name, o) in &inst.operators {
            if suites.s2 {
                run.operator_s2(name, &o.op)?;
            }
            if suites.s3 {
                run.operator_s3(name, &o.op)?;
            }
            if suites.s4 {
                constants.insert(name.clone(), run.operator_s4(name, &o.op)?);
            }
        }
        for (name, m) in &inst.maps {
            if suites.s2 || suites.s3 || suites.s4 {
                run.map(name, &m.map)?;
            }
        }
        if suites.s2 {
            for (name, v) in &inst.linear_maps {
                for (sname, s) in &inst.spaces {
                    let t = delta_box(&v.map, s, caps)?;
                    let c = Check::equality("LipL(δ_X ⊠ v) = ‖v‖", &lipl_norm(&t)?, &v.map.norm());
                    run.push("s2", &format!("{name} on {sname}"), c);
                }
            }
            for (name, t) in &inst.two_lipschitz {
                let op = from_two_lipschitz(&t.table, caps)?;
                run.push(
                    "s2",
                    name,
                    Check::equality("BLip = LipL into the free space", &blip_norm(&t.table), &lipl_norm(&op)?),
                );
                let back = restrict_two_lipschitz(&op, &t.table.y_space)?;
                run.push(
                    "s2",
                    name,
                    Check::certificate("restriction recovers the table", back.values() == t.table.values(), None),
                );
            }
            for (name, u) in &inst.tensors {
                let (s, e) = (&inst.spaces[&u.space], &inst.norms[&u.factor]);
                let c = Check::bound(
                    "injective <= projective",
                    &injective_norm(&u.tensor, s, e, caps)?,
                    &projective_norm(&u.tensor, s, e)?,
                );
                run.push("s2", name, c);
            }
        }
        if suites.s4 {
            for (name, s) in &inst.samples {
                let t = &inst.operators[&s.operator].op;
                let upper = match constants.get(&s.operator) {
                    Some(c) => c.clone(),
                    None => dominated_two_measure(t, caps, &run.opts)?.value.upper,
                };
                let lb = dominated_lower_bound(t, &int(1), &int(1), &s.sequence(), caps)?;
                run.push("s4", name, Check::bound("sample lower bound <= certified constant", &lb, &upper));
            }
        }
        all.extend(run.checks);
    }
    Ok(all)
}
