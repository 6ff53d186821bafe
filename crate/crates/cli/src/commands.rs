use sineq_core::bodies::{Body, ReinhardtBody, UnconditionalBody};
use sineq_core::entropy::{
    check_lemma_1d, check_lemma_multidim, check_subadditivity, EntropyReport, MonotoneRadialFunction,
    StepFunction, TailMeasure1D,
};
use sineq_core::integrate::estimate_measure;
use sineq_core::moments::{moment_ratio, parse_norm};
use sineq_core::verify::{check_tensorization, ensure_valid, tolerance_for, verify_body, Verdict};
use sineq_core::{Error, MeasureKind};

use crate::config::{Lemma, MeasureFamily, RunConfig};
use crate::output::Record;

pub fn run(cfg: &RunConfig) -> Result<Vec<Record>, Error> {
    match cfg.command {
        "measure" => cmd_measure(cfg),
        "verify" => cmd_verify(cfg),
        "entropy" => cmd_entropy(cfg),
        "moments" => cmd_moments(cfg),
        "fuzz" => cmd_fuzz(cfg),
        other => unreachable!("unknown command {other}"),
    }
}

/// Parses a descriptor in the given family, or tries Reinhardt first and
/// then unconditional when no measure was named.
pub fn parse_body(descriptor: &str, family: Option<MeasureFamily>) -> Result<Body, Error> {
    match family {
        Some(MeasureFamily::ComplexGaussian) => Ok(ReinhardtBody::parse(descriptor)?.into()),
        Some(MeasureFamily::Exponential) => Ok(UnconditionalBody::parse(descriptor)?.into()),
        None => match ReinhardtBody::parse(descriptor) {
            Ok(b) => Ok(b.into()),
            Err(first) => UnconditionalBody::parse(descriptor).map(Body::from).map_err(|_| first),
        },
    }
}

fn cmd_measure(cfg: &RunConfig) -> Result<Vec<Record>, Error> {
    let mut records = Vec::new();
    for (i, desc) in cfg.bodies.iter().enumerate() {
        let body = parse_body(desc, cfg.measure)?;
        let est = estimate_measure(&body, cfg.engine)?;
        let mut r = Record::new(cfg, i as u64, body.to_string(), "measure", est.value);
        r.std_error = est.std_error;
        r.reference = body.exact_measure_and_moment().map(|(m, _)| m);
        r.method = est.method.label();
        r.tolerance = tolerance_for(est.method, est.std_error);
        records.push(r);
    }
    Ok(records)
}

fn cmd_verify(cfg: &RunConfig) -> Result<Vec<Record>, Error> {
    let bodies: Vec<Body> = cfg
        .bodies
        .iter()
        .map(|d| parse_body(d, cfg.measure))
        .collect::<Result<_, _>>()?;
    if cfg.tensorize {
        let report = check_tensorization(&bodies, cfg.engine)?;
        let mut records: Vec<Record> = report
            .parts
            .iter()
            .enumerate()
            .map(|(i, p)| Record::from_row(cfg, i as u64, p.row()))
            .collect();
        records.push(Record::from_row(cfg, bodies.len() as u64, report.product.row()));
        return Ok(records);
    }
    let mut records = Vec::new();
    for (i, body) in bodies.iter().enumerate() {
        let v = verify_body(body, &cfg.t_grid, cfg.engine)?;
        records.extend(v.rows().into_iter().map(|row| Record::from_row(cfg, i as u64, row)));
    }
    Ok(records)
}

/// Splits `step:...:exp` into the function and its measure.
fn split_measure_suffix(f: &str) -> (&str, Option<&str>) {
    if let Some(at) = f.find(":atoms:") {
        return (&f[..at], Some(&f[at + 1..]));
    }
    match f.rsplit_once(':') {
        Some((head, tail)) if tail == "exp" || tail == "radial" => (head, Some(tail)),
        _ => (f, None),
    }
}

fn entropy_record(cfg: &RunConfig, subject: String, check: &str, rep: &EntropyReport) -> Record {
    let deterministic = rep.lhs_method.is_deterministic() && rep.rhs_method.is_deterministic();
    let verdict = if rep.holds {
        Verdict::Holds
    } else if deterministic {
        Verdict::Violated
    } else {
        Verdict::Inconclusive
    };
    let method = if rep.lhs_method == rep.rhs_method {
        rep.lhs_method.label()
    } else {
        format!("{}/{}", rep.lhs_method.label(), rep.rhs_method.label())
    };
    Record {
        std_error: rep.lhs_std_error,
        reference: Some(rep.rhs),
        margin: Some(rep.slack),
        verdict: Some(verdict.as_str()),
        method,
        tolerance: rep.tolerance,
        ..Record::new(cfg, 0, subject, check, rep.lhs)
    }
}

fn cmd_entropy(cfg: &RunConfig) -> Result<Vec<Record>, Error> {
    if cfg.lemma == Lemma::OneD {
        let (f, suffix) = split_measure_suffix(&cfg.f[0]);
        let mu = suffix.or(cfg.mu.as_deref()).unwrap_or("exp");
        let f = StepFunction::parse(f)?;
        let mu = TailMeasure1D::parse(mu)?;
        let rep = check_lemma_1d(&f, &mu);
        return Ok(vec![entropy_record(cfg, format!("{f} on {mu}"), "lemma-1d", &rep)]);
    }
    let g = if let Some(desc) = cfg.bodies.first() {
        let body = ensure_valid(&parse_body(desc, cfg.measure)?)?;
        MonotoneRadialFunction::complement(&body)
    } else {
        let n = cfg.f.len();
        let measure = match cfg.measure.unwrap_or(MeasureFamily::ComplexGaussian) {
            MeasureFamily::ComplexGaussian => MeasureKind::complex_gaussian(n)?,
            MeasureFamily::Exponential => MeasureKind::exponential(n)?,
        };
        let steps = cfg
            .f
            .iter()
            .map(|s| match split_measure_suffix(s) {
                (f, None) => StepFunction::parse(f),
                (_, Some(_)) => Err(Error::Descriptor {
                    input: s.clone(),
                    reason: "factors take their measure from --measure".into(),
                }),
            })
            .collect::<Result<Vec<_>, _>>()?;
        MonotoneRadialFunction::product_of_steps(measure, steps)?
    };
    let (check, rep) = match cfg.lemma {
        Lemma::Multidim => ("lemma-multidim", check_lemma_multidim(&g, cfg.engine)?),
        _ => ("subadditivity", check_subadditivity(&g, cfg.engine)?),
    };
    Ok(vec![entropy_record(cfg, g.name().to_string(), check, &rep)])
}

fn cmd_moments(cfg: &RunConfig) -> Result<Vec<Record>, Error> {
    let n = cfg.n.expect("validated");
    let norm = parse_norm(&cfg.norm, n)?;
    let pair = moment_ratio(&norm, cfg.p, cfg.q, n, cfg.engine)?;
    let subject = format!("{} p={} q={}", pair.norm, pair.p, pair.q);
    Ok(vec![Record {
        std_error: pair.ratio_std_error,
        reference: Some(pair.bound),
        margin: Some(pair.margin),
        verdict: Some(pair.verdict.as_str()),
        method: pair.method.label(),
        tolerance: pair.tolerance,
        ..Record::new(cfg, 0, subject, "moment-ratio", pair.ratio)
    }])
}

fn cmd_fuzz(cfg: &RunConfig) -> Result<Vec<Record>, Error> {
    let family = cfg.family.expect("validated");
    let n = cfg.n.expect("validated");
    let mut records = Vec::new();
    let mut counts = [0u64; 4];
    let mut overall = f64::INFINITY;
    for i in 0..cfg.count {
        let body = family.sample(n, cfg.seed, i)?;
        let v = verify_body(&body, &cfg.t_grid, cfg.engine)?;
        let rows = v.rows();
        // t = 1 is an identity with margin 0; it would mask the minimum.
        let worst = rows
            .iter()
            .filter(|r| !r.margin.is_nan() && r.t != Some(1.0))
            .min_by(|a, b| a.margin.total_cmp(&b.margin));
        let mut r = Record::new(cfg, i, v.body.clone(), "verify", f64::NAN);
        if let Some(w) = worst {
            overall = overall.min(w.margin);
            r.value = w.margin;
            r.margin = Some(w.margin);
            r.std_error = w.std_error;
            r.method = w.method.clone();
            r.tolerance = w.tolerance;
        }
        r.verdict = Some(v.verdict.as_str());
        counts[match v.verdict {
            Verdict::Holds => 0,
            Verdict::Violated => 1,
            Verdict::Inconclusive => 2,
            Verdict::Trivial => 3,
        }] += 1;
        records.push(r);
    }
    let mut summary = Record::new(cfg, cfg.count, format!("{family} n={n}"), "summary", overall);
    summary.margin = Some(overall);
    summary.verdict = Some(
        if counts[1] > 0 {
            Verdict::Violated
        } else if counts[2] > 0 {
            Verdict::Inconclusive
        } else {
            Verdict::Holds
        }
        .as_str(),
    );
    summary.holds = Some(counts[0]);
    summary.violated = Some(counts[1]);
    summary.inconclusive = Some(counts[2]);
    summary.trivial = Some(counts[3]);
    records.push(summary);
    Ok(records)
}
