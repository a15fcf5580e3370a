use std::path::Path;

use branchpoint::config::{DoublePointConfig, KnotConfig, SamplerConfig};
use branchpoint::deformation::{
    build_family_member, gauss_residuals, parameter_lengths, sample_generic, sunflower,
    PerturbParams, Recipe,
};
use branchpoint::intersect::{find_double_points, is_transverse, DoublePoint};
use branchpoint::knot::{
    evaluate_double_point_formula, knot_invariants, negative_orientation_report, select_eta,
    KnotReport,
};
use branchpoint::weierstrass::Relabel;
use branchpoint::{Error, GaussValue, Order, Orientation, WeierstrassData, C};
use serde::Serialize;

use crate::io::{braid_json, knot_csv, load_input, load_params, to_json, write_file};
use crate::{CliError, Common, Family, Search};

type W = WeierstrassData<f64>;

fn emit<S: Serialize>(common: &Common, report: &S, text: impl FnOnce() -> String) {
    if common.json {
        println!("{}", to_json(report));
    } else {
        println!("{}", text());
    }
}

fn save(common: &Common, name: &str, contents: &str) -> Result<(), CliError> {
    if let Some(dir) = &common.out_dir {
        let path = write_file(dir, name, contents)?;
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

/// Input data relabeled so that `f₁′` has the smallest vanishing order.
fn load_relabeled(path: &Path) -> Result<(W, Relabel), CliError> {
    Ok(load_input(path)?.relabeled_min_first())
}

fn search_config(search: &Search) -> DoublePointConfig<f64> {
    DoublePointConfig {
        radius: search.radius,
        grid_n: search.grid_n,
        ..DoublePointConfig::default()
    }
}

/// Explicit parameters if given, otherwise a generic sample at scale `t`.
fn family_params(
    w: &W,
    family: &Family,
    search: &Search,
    default_t: Option<f64>,
) -> Result<Option<PerturbParams<f64>>, CliError> {
    if let Some(path) = &family.params {
        return Ok(Some(load_params(path)?));
    }
    let Some(t) = family.t.or(default_t) else {
        return Ok(None);
    };
    let cfg = SamplerConfig {
        search: search_config(search),
        ..SamplerConfig::default()
    };
    Ok(Some(sample_generic(
        w,
        family.orientation,
        t,
        family.seed,
        &cfg,
    )?))
}

fn fmt_c(z: C<f64>) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else {
        format!("{}{:+}i", z.re, z.im)
    }
}

fn fmt_gauss(g: &GaussValue<f64>) -> String {
    match g {
        GaussValue::Infinity => "∞".into(),
        GaussValue::Finite(v) => fmt_c(*v),
    }
}

#[derive(Serialize)]
struct GaussSample {
    z: C<f64>,
    gamma_plus: Option<GaussValue<f64>>,
    gamma_minus: Option<GaussValue<f64>>,
}

#[derive(Serialize)]
struct AnalyzeReport {
    orders: [Order; 4],
    n: usize,
    branched: bool,
    branch_points: Vec<C<f64>>,
    conformality_residual: f64,
    relative_conformality_residual: f64,
    relabel: Relabel,
    gauss_samples: Vec<GaussSample>,
    gamma_plus_constant: bool,
    gamma_minus_constant: bool,
    symplectic_min_plus: f64,
    symplectic_min_minus: f64,
}

fn constant(values: &[Option<GaussValue<f64>>]) -> bool {
    let v: Vec<&GaussValue<f64>> = values.iter().flatten().collect();
    v.windows(2).all(|p| p[0].chordal_distance(p[1]) < 1e-9)
}

pub fn analyze(common: &Common) -> Result<(), CliError> {
    let w = load_input(&common.input)?;
    let (_, relabel) = w.relabeled_min_first();
    let branch_points = w.branch_points(w.default_branch_tol());
    let samples: Vec<C<f64>> = sunflower(64, 0.5)
        .into_iter()
        .filter(|z| branch_points.iter().all(|b| (z - b).norm() > 1e-6))
        .collect();
    let gauss_samples: Vec<GaussSample> = samples
        .iter()
        .map(|&z| {
            let g = w.gauss_maps(z).ok();
            GaussSample {
                z,
                gamma_plus: g.map(|g| g.0),
                gamma_minus: g.map(|g| g.1),
            }
        })
        .collect();
    let plus: Vec<_> = gauss_samples.iter().map(|g| g.gamma_plus).collect();
    let minus: Vec<_> = gauss_samples.iter().map(|g| g.gamma_minus).collect();
    let scan = |o: Orientation| {
        samples
            .iter()
            .filter_map(|&z| w.symplectic_positivity(z, o).ok())
            .fold(f64::INFINITY, f64::min)
    };
    let report = AnalyzeReport {
        orders: w.orders(),
        n: w.branching_multiplicity(),
        branched: w.is_branched(),
        branch_points,
        conformality_residual: w.conformality_residual(),
        relative_conformality_residual: w.relative_conformality_residual(),
        relabel,
        gamma_plus_constant: constant(&plus),
        gamma_minus_constant: constant(&minus),
        gauss_samples,
        symplectic_min_plus: scan(Orientation::Plus),
        symplectic_min_minus: scan(Orientation::Minus),
    };
    emit(common, &report, || {
        let orders: Vec<String> = report
            .orders
            .iter()
            .map(|o| o.finite().map_or("inf".into(), |n| n.to_string()))
            .collect();
        let branch = if report.branch_points.is_empty() {
            "no branch points".to_string()
        } else {
            let pts: Vec<String> = report.branch_points.iter().map(|&b| fmt_c(b)).collect();
            format!("branch at {}", pts.join(", "))
        };
        let describe = |name: &str, vals: &[Option<GaussValue<f64>>], constant: bool| {
            let first = vals
                .iter()
                .flatten()
                .next()
                .map_or("undefined".into(), fmt_gauss);
            if constant {
                format!("gauss {name}={first} (constant)")
            } else {
                format!("gauss {name} varies")
            }
        };
        format!(
            "orders=({}) N={}, {}, {}, {}\nconformality residual {:e} (relative {:e})\nsymplectic min: + {:.6}, - {:.6}",
            orders.join(","),
            report.n,
            branch,
            describe("γ₊", &plus, report.gamma_plus_constant),
            describe("γ₋", &minus, report.gamma_minus_constant),
            report.conformality_residual,
            report.relative_conformality_residual,
            report.symplectic_min_plus,
            report.symplectic_min_minus,
        )
    });
    save(common, "analyze.json", &to_json(&report))
}

#[derive(Serialize)]
struct MemberReport {
    relabel: Relabel,
    params: PerturbParams<f64>,
    recipe: Recipe,
    shift: usize,
    /// Deformed derivatives `h₁..h₄`, lowest degree first.
    h: Vec<Vec<C<f64>>>,
    conformality_residual: f64,
    relative_conformality_residual: f64,
    gauss_residual_plus: f64,
    gauss_residual_minus: f64,
    /// Residual of the Gauss map this orientation preserves.
    gauss_invariance_residual: f64,
}

pub fn deform(common: &Common, family: &Family, search: &Search) -> Result<(), CliError> {
    let (w, relabel) = load_relabeled(&common.input)?;
    let p = family_params(&w, family, search, Some(0.05))?.expect("a default scale is given");
    let fm = build_family_member(&w, &p)?;
    let (gp, gm) = gauss_residuals(&fm, &sunflower(100, 0.5));
    let report = MemberReport {
        relabel,
        recipe: fm.recipe(),
        shift: fm.shift(),
        h: fm.h().iter().map(|h| h.coeffs().to_vec()).collect(),
        conformality_residual: fm.conformality_residual(),
        relative_conformality_residual: fm.deformed().relative_conformality_residual(),
        gauss_residual_plus: gp,
        gauss_residual_minus: gm,
        gauss_invariance_residual: if p.orientation == Orientation::Plus {
            gp
        } else {
            gm
        },
        params: p,
    };
    emit(common, &report, || {
        format!(
            "recipe {:?}, orientation {}, t = {}\nconformality residual {:e}\ngauss residual: + {:e}, - {:e}",
            report.recipe,
            report.params.orientation.symbol(),
            report.params.t,
            report.conformality_residual,
            report.gauss_residual_plus,
            report.gauss_residual_minus
        )
    });
    save(common, "member.json", &to_json(&report))?;
    save(common, "params.json", &to_json(&report.params))
}

pub fn double_points(common: &Common, family: &Family, search: &Search) -> Result<(), CliError> {
    let (w, _) = load_relabeled(&common.input)?;
    let params = family_params(&w, family, search, None)?;
    let mut cfg = search_config(search);
    let target = match &params {
        Some(p) => build_family_member(&w, p)?.deformed().clone(),
        None => {
            // the undeformed map: skip the neighborhoods of its branch points
            cfg.allow_branch_points = true;
            w
        }
    };
    let found = find_double_points(&target, &cfg)?;
    let points: Vec<DoublePoint<f64>> = found.points;
    emit(common, &points, || {
        let mut s = format!("D={}", points.len());
        for p in &points {
            s += &format!(
                "\n  z1={} z2={} |F|={:.3e} residual={:.1e} det={:.3e} transverse={}",
                fmt_c(p.z1),
                fmt_c(p.z2),
                branchpoint::linalg::norm4(&p.image),
                p.residual,
                p.transversality_det,
                is_transverse(p, &target, cfg.det_tol)
            );
        }
        s
    });
    eprintln!("search diagnostics: {:?}", found.diagnostics);
    save(common, "double_points.json", &to_json(&points))
}

fn knot_text(r: &KnotReport<f64>) -> String {
    format!(
        "eta={} N={} e={} sl={} crossings={} gauss={:.4} margins: + {:.4}, - {:.4}",
        r.eta, r.strands, r.e, r.sl, r.crossings, r.gauss, r.margin_plus, r.margin_minus
    )
}

pub fn knot(common: &Common, eta: Option<f64>) -> Result<(), CliError> {
    let (w, _) = load_relabeled(&common.input)?;
    let cfg = KnotConfig::default();
    let analysis = match eta {
        Some(eta) => knot_invariants(&w, eta, &cfg)?,
        None => select_eta(&w, &cfg)?,
    };
    let report = &analysis.report;
    emit(common, report, || {
        let mut s = knot_text(report);
        if !report.gauss_agrees(cfg.linking_tol) {
            s += "\nwarning: Gauss linking number and crossing count disagree";
        }
        s
    });
    save(common, "knot.csv", &knot_csv(&analysis.knot)?)?;
    save(common, "braid.json", &braid_json(&analysis.braid))?;
    save(common, "knot_report.json", &to_json(report))
}

pub fn verify(common: &Common, family: &Family, search: &Search, eta: f64) -> Result<(), CliError> {
    let (w, _) = load_relabeled(&common.input)?;
    let kcfg = KnotConfig::default();
    let dcfg = search_config(search);
    let explicit = family.params.is_some() || family.t.is_some();
    // without an explicit scale, shrink t until every double point lies in the eta-ball
    let mut t = eta / 10.0;
    let mut attempt = 0;
    let r = loop {
        let p = match family_params(&w, family, search, Some(t))? {
            Some(p) => p,
            None => PerturbParams::zero(&w, family.orientation)?,
        };
        if p.orientation == Orientation::Minus {
            let r = negative_orientation_report(&w, &p, eta, &kcfg, &dcfg)?;
            emit(common, &r, || r.summary());
            return save(common, "verify_negative.json", &to_json(&r));
        }
        if parameter_lengths(&w, p.orientation)? != (p.a.len(), p.b.len()) {
            return Err(
                Error::ParameterShape("parameters do not fit the input data".into()).into(),
            );
        }
        let r = evaluate_double_point_formula(&w, &p, eta, &kcfg, &dcfg)?;
        attempt += 1;
        if explicit || r.outside_ball == 0 || attempt == 4 {
            break r;
        }
        t /= 10.0;
    };
    emit(common, &r, || {
        format!(
            "D={} e={} N={} {}\nt={} sl={} 2D={} e-(N-1)={} deformed e={} margins: + {:.4}, - {:.4}{}",
            r.d,
            r.base.e,
            r.base.strands,
            if r.identity_holds && r.isotopy_holds { "OK" } else { "FAIL" },
            r.t,
            r.base.sl,
            r.lhs,
            r.rhs,
            r.deformed.e,
            r.base.margin_plus,
            r.base.margin_minus,
            if r.outside_ball > 0 {
                format!("\n{} double point(s) outside the eta-ball not counted", r.outside_ball)
            } else {
                String::new()
            }
        )
    });
    save(common, "verify.json", &to_json(&r))?;
    if !r.identity_holds {
        return Err(
            Error::FormulaViolation(format!("2D = {} but e - (N - 1) = {}", r.lhs, r.rhs)).into(),
        );
    }
    if !r.isotopy_holds {
        return Err(Error::FormulaViolation(format!(
            "deformed slice has e = {}, base slice has e = {}",
            r.deformed.e, r.base.e
        ))
        .into());
    }
    Ok(())
}
