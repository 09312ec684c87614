//! One function per subcommand; each returns report entries whose
//! certificates have already been substituted back into their inequalities.

use serde_json::json;

use super::instance::Instance;
use super::report::{Check, Entry};
use crate::config::Caps;
use crate::error::{Error, Result};
use crate::integral::{eps_dual_check, factorize_linfty, integral_norm, reconstruct};
use crate::linalg::{self, Vector};
use crate::operators::{
    associate_tr, blip_norm, bt_norm, from_two_lipschitz, injective_norm, linearization_norm, lip_norm, lip_of_table,
    lipl_norm, projective_norm_witness, FreeTensor, LipLinearOperator,
};
use num::One;

use crate::rational::{self, Rational};
use crate::spaces::{free_norm_with_witness, lip_constant, lipschitz_ball_vertices, FiniteMetricSpace, PolyhedralNorm};
use crate::summing::{
    dominated_two_measure, dominated_via_a, dominated_via_b, lipschitz_p_summing, q_summing, verify_certificate,
    DominatedResult, DominationCertificate, LinearTarget, Subject, SummingOptions,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormKind {
    LipL,
    Lip,
    BLip,
    Free,
    Pi,
    Eps,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SummingKind {
    LipP,
    Q,
    Dominated,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RouteChoice {
    A,
    B,
    Both,
}

fn lookup<'a, T>(what: &str, table: &'a std::collections::BTreeMap<String, T>, name: &str) -> Result<&'a T> {
    table.get(name).ok_or_else(|| {
        let known: Vec<&str> = table.keys().map(String::as_str).collect();
        Error::Parse(format!("no {what} named {name:?} (known: {})", known.join(", ")))
    })
}

/// `"a+b"`, `"2a - 1/2 b"`, `"3*c"`: a free vector `Σ c_x δ_x`.
pub fn parse_free_expression(expr: &str, space: &FiniteMetricSpace) -> Result<Vector> {
    let bad = |msg: String| Error::Parse(format!("free vector {expr:?}: {msg}"));
    let mut m = linalg::zeros(space.free_dim());
    let mut terms: Vec<(bool, String)> = Vec::new();
    let mut current = String::new();
    let mut negative = false;
    for ch in expr.chars() {
        if (ch == '+' || ch == '-') && !current.trim().is_empty() {
            terms.push((negative, std::mem::take(&mut current)));
            negative = ch == '-';
        } else if ch == '+' || ch == '-' {
            negative ^= ch == '-';
        } else {
            current.push(ch);
        }
    }
    if current.trim().is_empty() {
        return Err(bad("dangling sign or empty expression".into()));
    }
    terms.push((negative, current));
    for (negative, term) in terms {
        let term = term.trim();
        let (coef, label) = match term.split_once('*') {
            Some((c, l)) => (rational::parse(c.trim())?, l.trim().to_string()),
            None if space.index_of(term).is_some() => (rational::one(), term.to_string()),
            None => {
                let split = term.find(|c: char| !(c.is_ascii_digit() || c == '/')).unwrap_or(term.len());
                let (c, l) = term.split_at(split);
                if c.is_empty() {
                    return Err(bad(format!("unknown point label {term:?}")));
                }
                (rational::parse(c)?, l.trim().to_string())
            }
        };
        let x = space.index_of(&label).ok_or_else(|| bad(format!("unknown point label {label:?}")))?;
        if x != 0 {
            let c = if negative { -coef } else { coef };
            m[x - 1] += c;
        }
    }
    Ok(m)
}

fn verification(name: &str, cert: &DominationCertificate, subject: Subject<'_>) -> Result<Check> {
    let v = verify_certificate(cert, subject)?;
    let mut detail =
        format!("{} constraints checked{}", v.checked, if v.exhaustive { ", exhaustive" } else { ", sampled" });
    if let Some(why) = v.violation {
        detail = format!("{detail}; {why}");
    }
    Ok(Check::certificate(name, v.passed, Some(detail)))
}

/// `(g(x) − g(y))·v <= d(x, y)` on every pair and vertex, and `⟨u, g⟩ = value`.
fn projective_witness_check(
    u: &FreeTensor,
    g: &[Vector],
    space: &FiniteMetricSpace,
    factor: &PolyhedralNorm,
    value: &Rational,
) -> Check {
    let at = |x: usize| if x == 0 { linalg::zeros(factor.dim()) } else { g[x - 1].clone() };
    let feasible = space.pairs().all(|(x, y)| {
        let diff = linalg::sub(&at(x), &at(y));
        factor.primal_vertices().iter().all(|v| linalg::dot(&diff, v) <= *space.d(x, y))
    });
    let pairing: Rational = u.coeffs().iter().zip(g).map(|(c, gx)| linalg::dot(c, gx)).sum();
    Check::certificate(
        "norming LipL-functional",
        feasible && pairing == *value,
        Some(format!("LipL(g) <= 1: {feasible}; <u, g> = {}", rational::format(&pairing))),
    )
}

pub fn norm(kind: NormKind, inst: &Instance, object: &str, caps: &Caps) -> Result<Entry> {
    match kind {
        NormKind::LipL => {
            let t = &lookup("operator", &inst.operators, object)?.op;
            let v = lipl_norm(t)?;
            Ok(Entry::new("LipL", object, &v)
                .check(Check::equality("Lip of the point table", &v, &lip_of_table(t)?))
                .check(Check::equality("norm of the column operator", &v, &bt_norm(t)?))
                .check(Check::equality("norm of the linearization", &v, &linearization_norm(t)?)))
        }
        NormKind::Lip => {
            let r = &lookup("map", &inst.maps, object)?.map;
            let v = lip_norm(r)?;
            Ok(Entry::new("Lip", object, &v).check(Check::equality(
                "LipL of the associated operator",
                &v,
                &lipl_norm(&associate_tr(r))?,
            )))
        }
        NormKind::BLip => {
            let t = &lookup("two-Lipschitz table", &inst.two_lipschitz, object)?.table;
            let v = blip_norm(t);
            let op = from_two_lipschitz(t, caps)?;
            Ok(Entry::new("BLip", object, &v).check(Check::equality(
                "LipL of the operator into the free space",
                &v,
                &lipl_norm(&op)?,
            )))
        }
        NormKind::Free => {
            // `SPACE:EXPR`, or just `EXPR` when the instance has a single space
            let prefixed =
                object.split_once(':').and_then(|(s, rest)| inst.spaces.get_key_value(s).map(|kv| (kv, rest)));
            let ((name, space), expr) = match prefixed {
                Some(found) => found,
                None if inst.spaces.len() == 1 => (inst.spaces.iter().next().expect("one space"), object),
                None => {
                    return Err(Error::Parse(format!(
                        "write the free vector as SPACE:EXPR, SPACE one of {:?}",
                        inst.spaces.keys().collect::<Vec<_>>()
                    )))
                }
            };
            let m = parse_free_expression(expr, space)?;
            let (v, f) = free_norm_with_witness(&m, space)?;
            let verts = lipschitz_ball_vertices(space, caps)?;
            let vertex_max = verts.iter().map(|g| linalg::dot(g, &m)).max().unwrap_or_else(rational::zero);
            let lip = lip_constant(space, &f);
            let pairing = linalg::dot(&f, &m);
            Ok(Entry::new("free norm", &format!("{expr} in {name}"), &v)
                .certificate(&json!({ "norming_function": f.iter().map(rational::format).collect::<Vec<_>>() }))
                .check(Check::certificate(
                    "norming function",
                    lip <= rational::one() && pairing == v,
                    Some(format!("Lip(f) = {}, f(m) = {}", rational::format(&lip), rational::format(&pairing))),
                ))
                .check(Check::equality("max over Lipschitz-ball vertices", &v, &vertex_max)))
        }
        NormKind::Pi | NormKind::Eps => {
            let t = lookup("tensor", &inst.tensors, object)?;
            let (space, factor) = (&inst.spaces[&t.space], &inst.norms[&t.factor]);
            let (pi, g) = projective_norm_witness(&t.tensor, space, factor)?;
            let eps = injective_norm(&t.tensor, space, factor, caps)?;
            if kind == NormKind::Pi {
                Ok(Entry::new("projective norm", object, &pi)
                    .certificate(&json!({ "norming_table": g.iter().map(|r| r.iter().map(rational::format).collect::<Vec<_>>()).collect::<Vec<_>>() }))
                    .check(projective_witness_check(&t.tensor, &g, space, factor, &pi))
                    .check(Check::bound("injective norm below", &eps, &pi)))
            } else {
                Ok(Entry::new("injective norm", object, &eps).check(Check::bound(
                    "below the projective norm",
                    &eps,
                    &pi,
                )))
            }
        }
    }
}

fn dominated_json(r: &DominatedResult) -> serde_json::Value {
    let fmt2 =
        |vs: &[Vector]| vs.iter().map(|v| v.iter().map(rational::format).collect::<Vec<_>>()).collect::<Vec<_>>();
    json!({
        "lipschitz": r.lipschitz.as_ref().map(|(targets, cert)| json!({ "targets": targets, "certificate": cert })),
        "linear": r.linear.iter().map(|(target, cert)| json!({ "functionals": fmt2(&target.functionals), "certificate": cert })).collect::<Vec<_>>(),
    })
}

fn dominated_entry(
    t: &LipLinearOperator,
    r: &DominatedResult,
    object: &str,
    p: &Rational,
    q: &Rational,
) -> Result<Entry> {
    let name = format!("dominated ({},{}) route {:?}", rational::format(p), rational::format(q), r.route);
    let mut e = Entry::new(&name, object, &r.value).certificate(&dominated_json(r));
    if let Some((targets, cert)) = &r.lipschitz {
        e = e.check(verification("Lipschitz domination", cert, Subject::Distances { space: &t.space, targets })?);
    }
    for (k, (target, cert)) in r.linear.iter().enumerate() {
        e = e.check(verification(&format!("linear domination #{k}"), cert, Subject::Linear(target))?);
    }
    Ok(e)
}

fn parse_exponent(text: &str) -> Result<Rational> {
    let r = rational::parse(text)?;
    crate::summing::check_exponent(&r)?;
    Ok(r)
}

pub fn summing(
    kind: SummingKind,
    inst: &Instance,
    object: &str,
    p: &str,
    q: &str,
    route: RouteChoice,
    caps: &Caps,
) -> Result<Vec<Entry>> {
    let (p, q) = (parse_exponent(p)?, parse_exponent(q)?);
    let opts = SummingOptions::default();
    match kind {
        SummingKind::LipP => {
            let r = &lookup("map", &inst.maps, object)?.map;
            let s = lipschitz_p_summing(r, &p, caps)?;
            let name = format!("Lipschitz {}-summing", rational::format(&p));
            Ok(vec![Entry::new(&name, object, &s.value).certificate(&s.certificate).check(verification(
                "Pietsch domination",
                &s.certificate,
                Subject::Map(r),
            )?)])
        }
        SummingKind::Q => {
            let v = &lookup("linear map", &inst.linear_maps, object)?.map;
            let s = q_summing(v, &q, caps)?;
            let name = format!("{}-summing", rational::format(&q));
            let target = LinearTarget::from_map(v);
            Ok(vec![Entry::new(&name, object, &s.value).certificate(&s.certificate).check(verification(
                "Pietsch domination",
                &s.certificate,
                Subject::Linear(&target),
            )?)])
        }
        SummingKind::Dominated => {
            let t = &lookup("operator", &inst.operators, object)?.op;
            let mut results = Vec::new();
            if route != RouteChoice::B {
                results.push(dominated_via_a(t, &p, &q, caps, &opts)?);
            }
            if route != RouteChoice::A {
                results.push(dominated_via_b(t, &p, &q, caps, &opts)?);
            }
            let mut entries =
                results.iter().map(|r| dominated_entry(t, r, object, &p, &q)).collect::<Result<Vec<_>>>()?;
            if let [a, b] = &results[..] {
                let same = if a.value == b.value { "equal" } else { "different" };
                entries.push(Entry::new(&format!("routes A and B give {same} values"), object, &a.value));
            }
            if p.is_one() && q.is_one() {
                // Each route only bounds the constant from below; pin it down directly.
                let two = dominated_two_measure(t, caps, &opts)?;
                let mut e = Entry::new("dominated (1,1) two-measure", object, &two.value)
                    .certificate(&two.certificate)
                    .check(verification("two-measure domination", &two.certificate, Subject::Operator(t))?);
                for r in &results {
                    let name = format!("route {:?} below the certified constant", r.route);
                    e = e.check(Check::bound(&name, &r.value.lower, &two.value.upper));
                }
                entries.push(e);
            }
            Ok(entries)
        }
    }
}

pub fn integral(inst: &Instance, object: &str, factorize: bool, caps: &Caps) -> Result<Vec<Entry>> {
    let t = &lookup("operator", &inst.operators, object)?.op;
    let res = integral_norm(t, caps)?;
    let back = reconstruct(&res.certificate, &t.space, &t.domain, &t.codomain)?;
    let mut e = Entry::new("integral norm", object, &res.value)
        .certificate(&res.certificate)
        .check(Check::certificate("representation reproduces the operator", back.table() == t.table(), None))
        .check(Check::equality("total variation", &res.value, &res.certificate.total_variation(&t.codomain)))
        .check(Check::bound("LipL below", &lipl_norm(t)?, &res.value));
    if t.is_scalar() {
        e = e.check(Check::equality("dual program over the ε-tensor ball", &res.value, &eps_dual_check(t, caps)?));
    }
    let mut out = vec![e];
    if factorize {
        let fac = factorize_linfty(&res.certificate, &t.space, &t.domain)?;
        let reproduces = (0..t.space.len()).all(|x| {
            (0..t.domain.dim()).all(|j| {
                let ej = linalg::unit(t.domain.dim(), j);
                fac.apply(x, &ej) == t.apply(x, &ej)[0]
            })
        });
        out.push(
            Entry::new("L∞ factorization", object, &fac.product)
                .certificate(&fac)
                .check(Check::certificate("discrete integral reproduces the operator", reproduces, None))
                .check(Check::bound("integral norm below", &res.value, &fac.product)),
        );
    }
    Ok(out)
}
