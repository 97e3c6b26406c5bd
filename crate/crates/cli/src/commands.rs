use std::path::Path;

use anyhow::{bail, Context, Result};
use hullscope::arrays::{
    diagonal_blobs, gaussian_blobs, gaussian_cloud, save_csv, save_csv_unlabeled, save_matrix, uniform_box, xor_dataset,
    DiagonalBlobs,
};
use hullscope::boundary::{closeness_report, nearest_boundary_estimate, lipschitz_estimate, NearestConfig};
use hullscope::hull::{default_max_iter, extrapolation_report, membership_batch, project_onto_hull, HullError, Membership};
use hullscope::overparam::{
    classify_regime, decompose_generalization, train, Activation, Architecture, Mlp, RegimeConfig, TrainConfig,
};
use hullscope::polyclass::{
    epsilon_equal, fit_separator, functional_margin, lemma1_gap_curve, lemma3_extensions, minimal_degree_separator,
    Anchor, ExtensionConfig, PolynomialSurface, Region, DEFAULT_RIDGE,
};
use hullscope::{Dataset, Hypercube, Matrix};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::args::*;
use crate::io::{load_input, load_labeled, load_points, two_classes};
use crate::render::{write_svg, Contour, Scene};
use crate::UsageError;

/// Polynomial fits live on the data's bounding cube, padded by this share.
const FIT_PAD: f64 = 0.25;
/// Largest degree tried when a command picks the separator degree itself.
const AUTO_MAX_DEGREE: usize = 10;

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(UsageError(format!("--{name} must be a positive number, got {v}")).into())
    }
}

fn label(l: &LabelArg) -> Option<&str> {
    l.label_col.as_deref()
}

/// Every command's result object (the caller adds the config echo).
pub fn execute(cmd: &Command) -> Result<Value> {
    match cmd {
        Command::HullCheck(a) => hull_check(a),
        Command::Project(a) => project(a),
        Command::ExtrapReport(a) => extrap_report(a),
        Command::FitPoly(a) => fit_poly(a),
        Command::MinDegree(a) => min_degree(a),
        Command::Lemma1Gap(a) => lemma1(a),
        Command::Lemma3Demo(a) => lemma3(a),
        Command::EpsEqual(a) => eps_equal(a),
        Command::BoundaryDist(a) => boundary_dist(a),
        Command::Closeness(a) => closeness(a),
        Command::Lipschitz(a) => lipschitz(a),
        Command::Train(a) => train_cmd(a),
        Command::Regime(a) => regime(a),
        Command::Decompose(a) => decompose(a),
        Command::GenData(a) => gen_data(a),
    }
}

fn check_dims(a: &Matrix, b: &Matrix) -> Result<()> {
    if a.cols() != b.cols() {
        bail!("dimension mismatch: training data has {} columns, other input {}", a.cols(), b.cols());
    }
    Ok(())
}

fn hull_check(a: &HullCheckArgs) -> Result<Value> {
    positive("dist-tol", a.dist_tol)?;
    let train = load_input(&a.train, label(&a.label), false)?.dataset;
    let query = load_points(&a.query, label(&a.label))?;
    check_dims(train.points(), &query)?;
    let results = membership_batch(&query, train.points(), a.dist_tol)?;
    let count = |f: fn(&Membership) -> bool| results.iter().filter(|m| f(m)).count();
    if let Some(path) = &a.render {
        write_svg(
            &Scene {
                points: Some((train.points(), train.labels())),
                queries: Some(&query),
                hull: Some(train.points()),
                ..Scene::default()
            },
            path,
        )?;
    }
    Ok(json!({
        "n_train": train.n(),
        "n_query": query.rows(),
        "n_inside": count(Membership::is_inside),
        "n_outside": count(Membership::is_outside),
        "results": results,
    }))
}

fn project(a: &ProjectArgs) -> Result<Value> {
    positive("tol", a.tol)?;
    let train = load_points(&a.train, label(&a.label))?;
    let query = load_points(&a.query, label(&a.label))?;
    check_dims(&train, &query)?;
    let budget = default_max_iter(train.rows());
    let projections: Vec<_> = (0..query.rows())
        .into_par_iter()
        .map(|i| match project_onto_hull(query.row(i), &train, a.tol, budget) {
            Err(HullError::Unconverged { projection }) => Ok(*projection),
            other => other,
        })
        .collect::<Result<_, _>>()?;
    Ok(json!({ "n_train": train.rows(), "projections": projections }))
}

fn extrap_report(a: &ExtrapArgs) -> Result<Value> {
    positive("dist-tol", a.dist_tol)?;
    let train = load_input(&a.train, label(&a.label), false)?.dataset;
    let test = load_input(&a.test, label(&a.label), false)?.dataset;
    check_dims(train.points(), test.points())?;
    let report = extrapolation_report(&train, &test, a.dist_tol)?;
    if let Some(path) = &a.render {
        write_svg(
            &Scene {
                points: Some((train.points(), train.labels())),
                queries: Some(test.points()),
                hull: Some(train.points()),
                ..Scene::default()
            },
            path,
        )?;
    }
    Ok(json!({ "report": report }))
}

fn surface_scene<'a>(ds: &'a Dataset, surfaces: &'a [PolynomialSurface], path: &Path) -> Result<()> {
    let contours = surfaces
        .iter()
        .enumerate()
        .map(|(i, s)| Contour::new(move |x: &[f64]| s.eval(x), if i == 0 { "black" } else { "#999999" }))
        .collect();
    write_svg(
        &Scene {
            points: Some((ds.points(), ds.labels())),
            hull: Some(ds.points()),
            contours,
            ..Scene::default()
        },
        path,
    )?;
    Ok(())
}

fn fit_poly(a: &FitPolyArgs) -> Result<Value> {
    if !(a.ridge >= 0.0 && a.ridge.is_finite()) {
        return Err(UsageError(format!("--ridge must be >= 0, got {}", a.ridge)).into());
    }
    let ds = load_labeled(&a.train, label(&a.label))?;
    let (x, y) = two_classes(&ds)?;
    let domain = Hypercube::enclosing(ds.points(), FIT_PAD)?;
    let fit = fit_separator(&x, &y, a.degree, a.ridge, &domain)?;
    let margin = match fit.separator() {
        Some(f) => Some(functional_margin(f, &x, &y)?),
        None => None,
    };
    if let Some(path) = &a.render {
        surface_scene(&ds, std::slice::from_ref(fit.surface()), path)?;
    }
    Ok(json!({
        "separates": fit.separator().is_some(),
        "functional_margin": margin,
        "surface": fit.surface(),
        "fit": fit,
    }))
}

fn min_degree(a: &MinDegreeArgs) -> Result<Value> {
    let ds = load_labeled(&a.train, label(&a.label))?;
    let (x, y) = two_classes(&ds)?;
    let domain = Hypercube::enclosing(ds.points(), FIT_PAD)?;
    let found = minimal_degree_separator(&x, &y, a.degree, &domain)?;
    let margin = match &found {
        Some((_, f)) => Some(functional_margin(f, &x, &y)?),
        None => None,
    };
    if let (Some(path), Some((_, f))) = (&a.render, &found) {
        surface_scene(&ds, std::slice::from_ref(f), path)?;
    }
    Ok(json!({
        "min_degree": found.as_ref().map(|f| f.0),
        "max_degree_tried": a.degree,
        "functional_margin": margin,
        "surface": found.as_ref().map(|f| &f.1),
    }))
}

fn lemma1(a: &Lemma1Args) -> Result<Value> {
    positive("delta", a.delta)?;
    if a.samples < 2 || a.degree == 0 {
        return Err(UsageError("--samples must be at least 2 and --degree at least 1".into()).into());
    }
    let half = a.anchor.abs().max(1.0);
    let f = PolynomialSurface::from_terms(Hypercube::new(-half, half, 1)?, 1, &[(&[1], 1.0)])?;
    let n = a.samples;
    let inside = Matrix::new(n, 1, (0..n).map(|i| -0.5 + i as f64 / (n - 1) as f64).collect())?;
    let curve = lemma1_gap_curve(&f, 1..=a.degree, &inside, &[a.anchor], a.delta)?;
    let non_increasing = curve.windows(2).all(|w| w[1].1 <= w[0].1 + 1e-12);
    Ok(json!({
        "function": "f(x) = x",
        "inside": { "lower": -0.5, "upper": 0.5, "n": n },
        "curve": curve.iter().map(|(d, g)| json!({ "degree": d, "gap": g })).collect::<Vec<_>>(),
        "non_increasing": non_increasing,
    }))
}

/// The fixed two-blob scene used when `lemma3-demo` gets no data.
pub fn bundled_blobs() -> Dataset {
    gaussian_blobs(30, 2, &[vec![-1.0, 0.0], vec![1.0, 0.0]], 0.3, 5).expect("fixed blob parameters are valid")
}

fn lemma3(a: &Lemma3Args) -> Result<Value> {
    positive("epsilon", a.epsilon)?;
    let ds = match &a.train {
        Some(p) => load_labeled(p, label(&a.label))?,
        None => bundled_blobs(),
    };
    let (x, y) = two_classes(&ds)?;
    // A wide box leaves room outside the hull for the extensions to part ways.
    let domain = Hypercube::enclosing(ds.points(), 2.0)?;
    let fit = fit_separator(&x, &y, a.degree, DEFAULT_RIDGE, &domain)?;
    let Some(f) = fit.separator() else {
        bail!("degree-{} fit does not separate the classes; raise --degree", a.degree);
    };
    let anchors: Vec<Anchor> = domain
        .corners()
        .into_iter()
        .map(|point| Anchor { point, target: a.target })
        .collect();
    let cfg = ExtensionConfig {
        degree_up: a.degree_up,
        k: a.k,
        epsilon: a.epsilon,
        n_samples: a.samples,
        seed: a.common.seed,
    };
    let family = lemma3_extensions(f, ds.points(), &anchors, &cfg)?;
    if let Some(path) = &a.render {
        let mut all = vec![f.clone()];
        all.extend(family.members.iter().cloned());
        surface_scene(&ds, &all, path)?;
    }
    let min_pairwise = family.pairwise.iter().map(|w| w.deviation).fold(f64::INFINITY, f64::min);
    Ok(json!({
        "data": if a.train.is_some() { "file" } else { "bundled-blobs" },
        "base": f,
        "functional_margin": functional_margin(f, &x, &y)?,
        "all_inside_equal": family.inside_certificates.iter().all(|c| c.is_equal()),
        "min_pairwise_deviation": min_pairwise,
        "family": family,
    }))
}

fn read_surface(path: &Path) -> Result<PolynomialSurface> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let v: Value = serde_json::from_str(&text).with_context(|| format!("{} is not JSON", path.display()))?;
    // A bare surface, or any report carrying one under "surface".
    let inner = match v.get("surface") {
        Some(s) => s.clone(),
        None => v,
    };
    serde_json::from_value(inner).with_context(|| format!("{} holds no polynomial surface", path.display()))
}

fn eps_equal(a: &EpsEqualArgs) -> Result<Value> {
    positive("epsilon", a.epsilon)?;
    let f = read_surface(&a.f)?;
    let g = read_surface(&a.g)?;
    let region = match a.region {
        RegionKind::Box => Region::Box(*f.domain()),
        RegionKind::Hull => {
            let Some(p) = &a.train else {
                return Err(UsageError("--region hull needs --train".into()).into());
            };
            Region::Hull(load_points(p, label(&a.label))?)
        }
    };
    let cert = epsilon_equal(&f, &g, &region, a.epsilon, a.samples, a.common.seed)?;
    Ok(json!({ "equal": cert.is_equal(), "certificate": cert }))
}

struct PolyClassifier {
    surface: PolynomialSurface,
    separates: bool,
}

fn poly_classifier(ds: &Dataset, degree: Option<usize>) -> Result<PolyClassifier> {
    let (x, y) = two_classes(ds)?;
    let domain = Hypercube::enclosing(ds.points(), FIT_PAD)?;
    if let Some(deg) = degree {
        let fit = fit_separator(&x, &y, deg, DEFAULT_RIDGE, &domain)?;
        return Ok(PolyClassifier {
            separates: fit.separator().is_some(),
            surface: fit.surface().clone(),
        });
    }
    match minimal_degree_separator(&x, &y, AUTO_MAX_DEGREE, &domain)? {
        Some((_, surface)) => Ok(PolyClassifier {
            surface,
            separates: true,
        }),
        None => bail!("no polynomial of degree <= {AUTO_MAX_DEGREE} separates the classes; pass --degree"),
    }
}

fn probe_config(p: &ProbeArgs, sets: &[&Matrix], seed: u64) -> Result<NearestConfig> {
    let mut all = sets[0].clone();
    for m in &sets[1..] {
        all = all.vstack(m)?;
    }
    let mut cfg = NearestConfig::for_domain(&Hypercube::enclosing(&all, 0.5)?, p.directions, seed);
    if let Some(r) = p.max_radius {
        positive("max-radius", r)?;
        cfg.max_radius = r;
        cfg.tol = 1e-6 * r;
    }
    if let Some(t) = p.tol {
        positive("tol", t)?;
        cfg.tol = t;
    }
    cfg.refine = !p.no_refine;
    Ok(cfg)
}

fn boundary_dist(a: &BoundaryArgs) -> Result<Value> {
    let ds = load_labeled(&a.train, label(&a.label))?;
    let query = load_points(&a.query, label(&a.label))?;
    check_dims(ds.points(), &query)?;
    let clf = poly_classifier(&ds, a.degree)?;
    let cfg = probe_config(&a.probe, &[ds.points(), &query], a.common.seed)?;
    let estimates = query
        .iter_rows()
        .map(|q| nearest_boundary_estimate(&clf.surface, q, &cfg))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(json!({
        "classifier": { "separates": clf.separates, "surface": clf.surface },
        "probe": cfg,
        "estimates": estimates,
    }))
}

fn closeness(a: &ClosenessArgs) -> Result<Value> {
    let ds = load_labeled(&a.train, label(&a.label))?;
    let clean = load_points(&a.test, label(&a.label))?;
    let perturbed = load_points(&a.query, label(&a.label))?;
    check_dims(ds.points(), &clean)?;
    check_dims(ds.points(), &perturbed)?;
    let clf = poly_classifier(&ds, a.degree)?;
    let cfg = probe_config(&a.probe, &[ds.points(), &clean, &perturbed], a.common.seed)?;
    let report = closeness_report(&clf.surface, &clean, &perturbed, &cfg)?;
    Ok(json!({
        "classifier": { "separates": clf.separates, "surface": clf.surface },
        "probe": cfg,
        "report": report,
    }))
}

fn hidden_widths(spec: &str) -> Result<Vec<usize>> {
    let spec = spec.trim();
    if spec.is_empty() || spec == "none" {
        return Ok(Vec::new());
    }
    spec.split(',')
        .map(|w| match w.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(UsageError(format!("--hidden takes positive widths like 10,5 or none, got {spec:?}")).into()),
        })
        .collect()
}

fn network(net: &NetArgs, ds: &Dataset, seed: u64) -> Result<(Architecture, TrainConfig)> {
    let activation: Activation = net.activation.parse().map_err(UsageError)?;
    let hidden = hidden_widths(&net.hidden)?;
    positive("epsilon", net.epsilon)?;
    let arch = if ds.n_classes() <= 2 {
        Architecture::binary(ds.d(), &hidden, activation)?
    } else {
        let mut sizes = vec![ds.d()];
        sizes.extend(&hidden);
        sizes.push(ds.n_classes());
        Architecture::new(sizes, activation)?
    };
    let cfg = TrainConfig {
        epsilon: net.epsilon,
        max_epochs: net.epochs,
        n_restarts: net.restarts,
        seed,
        learning_rate: net.learning_rate,
        momentum: net.momentum,
    };
    Ok((arch, cfg))
}

fn fit_network(net: &NetArgs, ds: &Dataset, seed: u64) -> Result<(hullscope::overparam::TrainResult, Mlp)> {
    let (arch, cfg) = network(net, ds, seed)?;
    Ok(train(&Mlp::zeros(arch), ds, &cfg)?)
}

fn lipschitz(a: &LipschitzArgs) -> Result<Value> {
    let ds = load_labeled(&a.train, label(&a.label))?;
    let (res, model) = fit_network(&a.net, &ds, a.common.seed)?;
    let domain = Hypercube::enclosing(ds.points(), 0.1)?;
    let est = lipschitz_estimate(|x| model.features(x), &domain, a.pairs, a.common.seed, &[])?;
    Ok(json!({
        "feature_dim": model.features(ds.point(0)).len(),
        "training": res,
        "estimate": est,
    }))
}

fn train_cmd(a: &TrainArgs) -> Result<Value> {
    let ds = load_labeled(&a.train, label(&a.label))?;
    let (res, model) = fit_network(&a.net, &ds, a.common.seed)?;
    if let Some(path) = &a.render {
        let mut contours = Vec::new();
        if model.architecture.output_dim() == 1 {
            contours.push(Contour::new(|x: &[f64]| model.logits(x)[0], "black"));
        }
        write_svg(
            &Scene {
                points: Some((ds.points(), ds.labels())),
                contours,
                ..Scene::default()
            },
            path,
        )?;
    }
    Ok(json!({
        "training": res,
        "accuracy": model.accuracy(&ds)?,
        "model": model,
    }))
}

fn regime(a: &RegimeArgs) -> Result<Value> {
    let ds = load_labeled(&a.train, label(&a.label))?;
    let (arch, train) = network(&a.net, &ds, a.common.seed)?;
    let cfg = RegimeConfig {
        train,
        elimination_budget: a.budget,
    };
    Ok(json!({ "certificate": classify_regime(&arch, &ds, &cfg)? }))
}

fn decompose(a: &DecomposeArgs) -> Result<Value> {
    positive("dist-tol", a.dist_tol)?;
    let ds = load_labeled(&a.train, label(&a.label))?;
    let test = load_labeled(&a.test, label(&a.label))?;
    check_dims(ds.points(), test.points())?;
    let (res, model) = fit_network(&a.net, &ds, a.common.seed)?;
    let report = decompose_generalization(&model, &ds, &test, a.dist_tol)?;
    Ok(json!({ "training": res, "report": report }))
}

fn gen_data(a: &GenDataArgs) -> Result<Value> {
    let need_2d = |kind: &str| -> Result<()> {
        if a.d != 2 {
            return Err(UsageError(format!("--kind {kind} is 2-D only, got --d {}", a.d)).into());
        }
        Ok(())
    };
    let seed = a.common.seed;
    let (ds, labeled) = match a.kind {
        DataKind::Blobs => {
            let mut lo = vec![0.0; a.d];
            let mut hi = vec![0.0; a.d];
            if a.d > 0 {
                lo[0] = -2.0;
                hi[0] = 2.0;
            }
            (gaussian_blobs(a.n, a.d, &[lo, hi], a.noise, seed)?, true)
        }
        DataKind::Xor => {
            need_2d("xor")?;
            (xor_dataset(a.n, a.noise, seed)?, true)
        }
        DataKind::Diagonal => {
            need_2d("diagonal")?;
            let cfg = DiagonalBlobs {
                n_per_class: a.n,
                noise_std: a.noise,
                ..DiagonalBlobs::default()
            };
            (diagonal_blobs(&cfg, seed)?, true)
        }
        DataKind::Gaussian => (Dataset::unlabeled(gaussian_cloud(a.n, a.d, seed)?)?, false),
        DataKind::Uniform => {
            let cube = Hypercube::symmetric_unit(a.d);
            (Dataset::unlabeled(uniform_box(a.n, &cube, seed)?)?, false)
        }
    };
    let hsm = a.data_out.extension().is_some_and(|e| e == "hsm");
    if hsm {
        save_matrix(&a.data_out, ds.points())?;
    } else if labeled {
        save_csv(&ds, &a.data_out, "label")?;
    } else {
        save_csv_unlabeled(ds.points(), &a.data_out)?;
    }
    if let Some(path) = &a.render {
        write_svg(
            &Scene {
                points: Some((ds.points(), ds.labels())),
                ..Scene::default()
            },
            path,
        )?;
    }
    let counts: Vec<usize> = if labeled {
        (0..ds.n_classes()).map(|c| ds.labels().iter().filter(|&&l| l == c).count()).collect()
    } else {
        Vec::new()
    };
    Ok(json!({
        "n_points": ds.n(),
        "d": ds.d(),
        "labeled": labeled && !hsm,
        "format": if hsm { "hsm1" } else { "csv" },
        "class_counts": counts,
    }))
}
