//! Profile quantities over a grid in `t`.
//!
//! Columns, in order: `t, u, u_prime, v, w, u_plus_2tv, u2_minus_2ct, f_minus_c,
//! gamma, a`. Reals are written with 17 significant digits.

use kahler_lift::connection::ricci_coefficients;
use kahler_lift::profile::{integrability_scalar, EinsteinParams, LiftProfile, UProfile};
use kahler_lift::spaceform::SpaceForm;

use crate::args::ScanArgs;
use crate::CliError;

pub const COLUMNS: [&str; 10] =
    ["t", "u", "u_prime", "v", "w", "u_plus_2tv", "u2_minus_2ct", "f_minus_c", "gamma", "a"];

pub struct ScanTable {
    pub rows: Vec<[f64; 10]>,
    pub notice: Option<String>,
}

impl ScanTable {
    pub fn to_csv(&self) -> Result<Vec<u8>, CliError> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        let io = |e: csv::Error| CliError::Io(e.into());
        w.write_record(COLUMNS).map_err(io)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|x| format!("{x:.16e}"))).map_err(io)?;
        }
        w.into_inner().map_err(|e| CliError::Io(e.into_error()))
    }
}

/// Parses `einstein`, `sqrt:A,B`, `linear:A0,A1` or `constant:A`.
pub fn parse_profile(spec: &str, a: Option<f64>, c: f64) -> Result<UProfile, CliError> {
    let bad = || CliError::Config(format!("cannot parse profile `{spec}`"));
    let (kind, rest) = spec.split_once(':').unwrap_or((spec, ""));
    let nums: Vec<f64> = if rest.is_empty() {
        Vec::new()
    } else {
        rest.split(',').map(|x| x.trim().parse().map_err(|_| bad())).collect::<Result<_, _>>()?
    };
    match (kind.trim(), nums.as_slice()) {
        ("einstein", []) => {
            let a = a.ok_or_else(|| CliError::Config("the Einstein profile needs --A".into()))?;
            if a.is_nan() || a <= 0.0 {
                return Err(CliError::Config("A must be positive".into()));
            }
            Ok(UProfile::einstein(a, c))
        }
        ("sqrt", [a, b]) => Ok(UProfile::Sqrt { a: *a, b: *b }),
        ("linear", [a0, a1]) => Ok(UProfile::Linear { a0: *a0, a1: *a1 }),
        ("constant", [a]) => Ok(UProfile::Constant { a: *a }),
        _ => Err(bad()),
    }
}

pub fn scan(args: &ScanArgs) -> Result<ScanTable, CliError> {
    SpaceForm::new(args.n, args.c)?;
    let u = parse_profile(&args.profile, args.a, args.c)?;
    if let (Some(a), "einstein") = (args.a, args.profile.as_str()) {
        EinsteinParams::new(a, args.c, args.n)?;
    }
    if !(args.t_min >= 0.0 && args.t_max > args.t_min && args.t_min.is_finite() && args.t_max.is_finite()) {
        return Err(CliError::Config("t range must satisfy 0 <= t-min < t-max".into()));
    }
    if args.points < 2 {
        return Err(CliError::Config("a grid needs at least two points".into()));
    }
    let profile = LiftProfile::integrable(u, args.c);
    let bound = u.domain_bound();
    let c = args.c;
    let mut rows = Vec::new();
    let (mut clipped, mut skipped) = (0usize, 0usize);
    for k in 0..args.points {
        let t = args.t_min + (args.t_max - args.t_min) * k as f64 / (args.points - 1) as f64;
        if bound.is_some_and(|b| t >= b) {
            clipped += 1;
            continue;
        }
        let vals = match profile.values(t) {
            Ok(v) => v,
            Err(_) => {
                skipped += 1;
                continue;
            }
        };
        let ud = vals.u;
        let coeffs = ricci_coefficients(args.n, c, t, &ud);
        rows.push([
            t,
            ud.u,
            ud.u1,
            vals.v.f,
            vals.w.f,
            vals.horizontal_factor(),
            ud.u * ud.u - 2.0 * c * t,
            integrability_scalar(&ud, vals.v.f, t) - c,
            coeffs.gamma,
            coeffs.a,
        ]);
    }
    if rows.is_empty() {
        return Err(CliError::Config("no admissible grid points".into()));
    }
    let mut notes = Vec::new();
    if clipped > 0 {
        notes.push(format!(
            "notice: grid clipped to the admissible domain t < {}; {clipped} points dropped",
            bound.unwrap_or(f64::INFINITY)
        ));
    }
    if skipped > 0 {
        notes.push(format!("notice: {skipped} inadmissible or singular grid points dropped"));
    }
    Ok(ScanTable { rows, notice: (!notes.is_empty()).then(|| notes.join("\n")) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_specs() {
        assert!(matches!(parse_profile("einstein", Some(2.0), 1.0), Ok(UProfile::Sqrt { a, b }) if a == 2.0 && b == -2.0));
        assert!(matches!(parse_profile("linear:2,1", None, 0.0), Ok(UProfile::Linear { a0, a1 }) if a0 == 2.0 && a1 == 1.0));
        assert!(matches!(parse_profile("constant:3", None, 0.0), Ok(UProfile::Constant { a }) if a == 3.0));
        assert!(parse_profile("einstein", None, 1.0).is_err());
        assert!(parse_profile("einstein", Some(-1.0), 1.0).is_err());
        assert!(parse_profile("sqrt:1", None, 1.0).is_err());
        assert!(parse_profile("cubic:1,2", None, 1.0).is_err());
    }

    #[test]
    fn csv_layout() {
        let t = ScanTable { rows: vec![[0.5; 10]], notice: None };
        let s = String::from_utf8(t.to_csv().unwrap()).unwrap();
        let mut lines = s.lines();
        assert_eq!(lines.next(), Some("t,u,u_prime,v,w,u_plus_2tv,u2_minus_2ct,f_minus_c,gamma,a"));
        assert_eq!(lines.next().unwrap().split(',').next(), Some("5.0000000000000000e-1"));
        assert!(s.ends_with('\n') && !s.contains('\r'));
    }
}
