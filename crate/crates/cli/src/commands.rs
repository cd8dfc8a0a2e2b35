use crate::config::{PointSpec, Settings};
use crate::error::CliError;
use crate::output::{coords, Cell, Document};
use clap::ValueEnum;
use manifold_rkhs::curves::{curve_from_csv, isometry_to_circle, CurveKernel, EmbeddedCurve, SpectrumConvention};
use manifold_rkhs::fit::linear_fit;
use manifold_rkhs::kernels::{abel_kernel, Evaluator, KernelSpec, Method, SpectralKernel};
use manifold_rkhs::rkhs::{gram_from_evaluator, interpolate};
use manifold_rkhs::spectra::{
    base_point, distance, eigenfunction, point_at_distance, sample_points, Manifold, Point, Zonal,
};
use manifold_rkhs::verify::{run_suite, Relation, Suite};
use manifold_rkhs::Execution;
use std::f64::consts::{PI, TAU};
use std::path::Path;
use std::time::Instant;

/// Largest geodesic distance of `grid:N` on `R^n`.
pub const EUCLIDEAN_GRID_RADIUS: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Sweep {
    /// Truncation level against the reference value.
    Levels,
    /// Abel means and their extrapolants.
    Abel,
    /// Log-log slope of the kernel near the diagonal.
    Slope,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Convention {
    /// Circle of the curve's length.
    Explicit,
    /// Metric rescaled to length 2π.
    Rescale,
}

/// What a command produced, and the exit code to report.
pub struct Outcome {
    pub document: Document,
    pub code: u8,
}

impl From<Document> for Outcome {
    fn from(document: Document) -> Self {
        Self { document, code: 0 }
    }
}

fn exec(settings: &Settings) -> Execution {
    if settings.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    }
}

fn method_name(m: Method) -> &'static str {
    match m {
        Method::ClosedForm => "closed-form",
        Method::Spectral => "spectral",
        Method::Abel => "abel",
    }
}

/// Kernel evaluator for the configured spec; `--abel` switches to Abel
/// summation below the RKHS threshold.
fn evaluator(settings: &Settings, spec: KernelSpec, abel: bool) -> Result<Evaluator, CliError> {
    let m = settings.manifold;
    if abel && m.is_compact() && !spec.in_rkhs_regime(&m) {
        Ok(Evaluator::abel(m, spec)?)
    } else {
        Ok(Evaluator::new(m, spec)?)
    }
}

pub fn load_points(settings: &Settings) -> Result<Vec<Point>, CliError> {
    let m = &settings.manifold;
    match &settings.points {
        PointSpec::Grid(n) => {
            let extent = if m.is_compact() { PI } else { EUCLIDEAN_GRID_RADIUS };
            Ok((0..*n)
                .map(|i| {
                    let r = if *n == 1 {
                        0.0
                    } else {
                        extent * i as f64 / (*n - 1) as f64
                    };
                    point_at_distance(m, r)
                })
                .collect())
        }
        PointSpec::Random { n, seed } => Ok(sample_points(m, *n, *seed)),
        PointSpec::File(path) => read_points(path, m),
    }
}

fn read_rows(path: &Path) -> Result<Vec<Vec<f64>>, CliError> {
    let file =
        std::fs::File::open(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(file);
    let mut rows = Vec::new();
    for (line, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        match record.iter().map(str::parse::<f64>).collect::<Result<Vec<_>, _>>() {
            Ok(row) => rows.push(row),
            Err(_) if rows.is_empty() && line == 0 => continue, // header
            Err(e) => return Err(CliError::Config(format!("{} row {}: {e}", path.display(), line + 1))),
        }
    }
    if rows.is_empty() {
        return Err(CliError::Config(format!("{} holds no rows", path.display())));
    }
    Ok(rows)
}

/// One point per row: an angle or `x, y` on the circle, unit vectors on a
/// sphere (normalized on read), coordinates on `R^n`.
fn read_points(path: &Path, m: &Manifold) -> Result<Vec<Point>, CliError> {
    read_rows(path)?
        .into_iter()
        .enumerate()
        .map(|(i, row)| {
            let wrong = || {
                CliError::Config(format!(
                    "{} row {}: {} values do not fit {m}",
                    path.display(),
                    i + 1,
                    row.len()
                ))
            };
            match (m, row.len()) {
                (Manifold::Circle, 1) => Ok(Point::angle(row[0])),
                (Manifold::Circle, 2) => Ok(Point::angle(row[1].atan2(row[0]))),
                (Manifold::Sphere { dim }, n) if n == *dim => Ok(Point::normalized(row)?),
                (Manifold::Euclidean { dim }, n) if n == *dim => Ok(Point::euclidean(row)),
                _ => Err(wrong()),
            }
        })
        .collect()
}

fn point_text(p: &Point) -> String {
    match p {
        Point::Circle(t) => crate::output::float(*t),
        _ => coords(&p.coords()),
    }
}

/// Geometric grid of `n` values from `lo` to `hi`.
fn geometric(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>, CliError> {
    if !(lo > 0.0 && hi > lo && n >= 2) {
        return Err(CliError::Config(format!(
            "need 0 < min separation < max separation and >= 2 samples (got {lo}, {hi}, {n})"
        )));
    }
    let ratio = (hi / lo).ln() / (n - 1) as f64;
    // endpoints exact, so a grid ending at π hits the antipode
    Ok((0..n)
        .map(|i| if i + 1 == n { hi } else { lo * (ratio * i as f64).exp() })
        .collect())
}

pub fn eval(settings: &Settings, check: bool) -> Result<Outcome, CliError> {
    let points = load_points(settings)?;
    let spec = settings.spec();
    let ev = evaluator(settings, spec.clone(), settings.abel)?;
    let reference = if check {
        Some(Evaluator::spectral(settings.manifold, spec)?)
    } else {
        None
    };
    let anchor = base_point(&settings.manifold);
    let mut columns = vec!["index", "point", "distance", "value", "tail", "method"];
    if check {
        columns.extend(["spectral_value", "spectral_tail"]);
    }
    let mut doc = Document::new("eval", &columns);
    doc.note("anchor", point_text(&anchor));
    for (i, p) in points.iter().enumerate() {
        let v = ev.eval(&anchor, p)?;
        let mut row: Vec<Cell> = vec![
            i.into(),
            point_text(p).into(),
            distance(&settings.manifold, &anchor, p)?.into(),
            v.value.into(),
            v.tail.into(),
            method_name(ev.method()).into(),
        ];
        if let Some(r) = &reference {
            let w = r.eval(&anchor, p)?;
            row.extend([w.value.into(), w.tail.into()]);
        }
        doc.push(row);
    }
    Ok(doc.into())
}

pub fn profile(settings: &Settings, samples: usize, min_sep: f64, max_sep: Option<f64>) -> Result<Outcome, CliError> {
    let m = settings.manifold;
    let max_sep = max_sep.unwrap_or(if m.is_compact() { PI } else { EUCLIDEAN_GRID_RADIUS });
    let ev = evaluator(settings, settings.spec(), settings.abel)?;
    let anchor = base_point(&m);
    let mut doc = Document::new("profile", &["distance", "value", "tail", "method"]);
    for r in geometric(min_sep, max_sep, samples)? {
        let v = ev.eval(&anchor, &point_at_distance(&m, r))?;
        doc.push(vec![
            r.into(),
            v.value.into(),
            v.tail.into(),
            method_name(ev.method()).into(),
        ]);
    }
    Ok(doc.into())
}

pub fn gram(settings: &Settings) -> Result<Outcome, CliError> {
    let points = load_points(settings)?;
    let ev = evaluator(settings, settings.spec(), settings.abel)?;
    let g = gram_from_evaluator(exec(settings), &ev, &points)?;
    let mut doc = Document::new("gram", &["i", "j", "value"]);
    doc.note("size", g.len());
    doc.note("method", method_name(g.method));
    doc.note("trace", g.trace());
    doc.note("min_eig_bound", g.min_eig_bound);
    doc.note(
        "certificate",
        match g.certificate {
            manifold_rkhs::rkhs::CertificateMethod::FullEigen => "full-eigen",
            manifold_rkhs::rkhs::CertificateMethod::Lanczos => "lanczos",
        },
    );
    doc.note("psd", g.is_psd());
    doc.note("max_tail", g.max_tail);
    for i in 0..g.len() {
        for j in 0..g.len() {
            doc.push(vec![i.into(), j.into(), g.entries[(i, j)].into()]);
        }
    }
    Ok(doc.into())
}

pub fn interp(settings: &Settings, target: &str, ridge: f64) -> Result<Outcome, CliError> {
    let m = settings.manifold;
    let points = load_points(settings)?;
    let values: Vec<f64> = match target.split_once(':') {
        Some(("mode", rest)) => {
            let (l, k) = rest
                .split_once(',')
                .and_then(|(l, k)| Some((l.trim().parse::<usize>().ok()?, k.trim().parse::<usize>().ok()?)))
                .ok_or_else(|| CliError::Config(format!("invalid target {target:?}: expected mode:L,K")))?;
            points
                .iter()
                .map(|p| eigenfunction(&m, l, k, p))
                .collect::<Result<_, _>>()?
        }
        _ => read_rows(Path::new(target.strip_prefix("file:").unwrap_or(target)))?
            .into_iter()
            .map(|row| row[0])
            .collect(),
    };
    let ev = evaluator(settings, settings.spec(), settings.abel)?;
    let g = gram_from_evaluator(exec(settings), &ev, &points)?;
    let fit = interpolate(&g, &values, ridge)?;
    let mut doc = Document::new("interp", &["index", "point", "target", "coefficient"]);
    doc.note("ridge", fit.ridge);
    doc.note("condition", fit.condition);
    doc.note("min_eig_bound", g.min_eig_bound);
    for (i, ((p, y), c)) in points.iter().zip(&values).zip(&fit.coefficients).enumerate() {
        doc.push(vec![i.into(), point_text(p).into(), (*y).into(), (*c).into()]);
    }
    Ok(doc.into())
}

pub fn verify(settings: &Settings, names: &[String]) -> Result<Outcome, CliError> {
    let mut suites = Vec::new();
    for name in names {
        if name == "all" {
            suites.extend(Suite::ALL);
        } else {
            suites.push(name.parse::<Suite>().map_err(|_| {
                let known: Vec<&str> = Suite::ALL.iter().map(|s| s.name()).collect();
                CliError::Config(format!("unknown suite {name:?}; known: all, {}", known.join(", ")))
            })?);
        }
    }
    let mut doc = Document::new("verify", &["suite", "check", "measured", "relation", "bound", "passed"]);
    let mut failed = 0usize;
    for suite in &suites {
        let start = Instant::now();
        let report = run_suite(*suite, exec(settings))?;
        eprintln!(
            "{} {} ({:.2} s)",
            if report.passed() { "PASS" } else { "FAIL" },
            suite,
            start.elapsed().as_secs_f64()
        );
        failed += usize::from(!report.passed());
        for check in &report.checks {
            let relation = match check.relation {
                Relation::AtMost => "<=",
                Relation::AtLeast => ">=",
                Relation::Holds => "holds",
            };
            // wall-clock time goes to stderr only, keeping the output reproducible
            let measured = if check.is_runtime() {
                eprintln!("  {check}");
                Cell::Text(String::new())
            } else {
                check.measured.into()
            };
            doc.push(vec![
                suite.name().into(),
                check.name.clone().into(),
                measured,
                relation.into(),
                check.bound.into(),
                check.passed.into(),
            ]);
        }
    }
    doc.note("suites", suites.len());
    doc.note("failed", failed);
    Ok(Outcome {
        document: doc,
        code: if failed == 0 { 0 } else { 1 },
    })
}

pub struct ConvergeArgs<'a> {
    pub sweep: Sweep,
    pub separation: Option<f64>,
    pub levels: &'a [usize],
    pub samples: usize,
    pub min_sep: f64,
    pub max_sep: f64,
}

pub fn converge(settings: &Settings, args: &ConvergeArgs) -> Result<Outcome, CliError> {
    let m = settings.manifold;
    let spec = settings.spec();
    let anchor = base_point(&m);
    match args.sweep {
        Sweep::Levels => {
            let geometry = m.geometry()?;
            let p = point_at_distance(&m, args.separation.unwrap_or(0.0));
            let reference = Evaluator::new(m, spec.clone())?.eval(&anchor, &p)?;
            let zonal = Zonal::between(&m, &anchor, &p)?;
            let mut doc = Document::new("converge", &["levels", "value", "error", "tail"]);
            doc.note("sweep", "levels");
            doc.note("reference", reference.value);
            doc.note("reference_tail", reference.tail);
            let (mut xs, mut ys) = (Vec::new(), Vec::new());
            for &levels in args.levels {
                let v = SpectralKernel::band_limited(geometry, &spec, levels)?.eval(&zonal)?;
                let error = (v.value - reference.value).abs();
                if error > 0.0 && levels > 0 {
                    xs.push((levels as f64).ln());
                    ys.push(error.ln());
                }
                doc.push(vec![levels.into(), v.value.into(), error.into(), v.tail.into()]);
            }
            if let Ok(fit) = linear_fit(&xs, &ys) {
                doc.note("rate", fit.slope);
                doc.note("r_squared", fit.r_squared);
            }
            Ok(doc.into())
        }
        Sweep::Abel => {
            let p = point_at_distance(&m, args.separation.unwrap_or(0.5));
            let est = abel_kernel(&m, &spec, &anchor, &p)?;
            let mut doc = Document::new("converge", &["index", "t", "mean", "extrapolant", "cauchy_difference"]);
            doc.note("sweep", "abel");
            doc.note("value", est.value);
            doc.note("difference", est.difference);
            doc.note("levels", est.levels);
            let blank = || Cell::Text(String::new());
            for (i, (t, mean)) in est.sequence.iter().enumerate() {
                let e = i.checked_sub(2).and_then(|j| est.extrapolants.get(j));
                let prev = i.checked_sub(3).and_then(|j| est.extrapolants.get(j));
                doc.push(vec![
                    i.into(),
                    (*t).into(),
                    (*mean).into(),
                    e.map_or_else(blank, |v| (*v).into()),
                    match (e, prev) {
                        (Some(a), Some(b)) => (a - b).abs().into(),
                        _ => blank(),
                    },
                ]);
            }
            Ok(doc.into())
        }
        Sweep::Slope => {
            // off the diagonal only, so the Abel route is always admissible
            let ev = evaluator(settings, spec, true)?;
            let mut doc = Document::new("converge", &["distance", "value", "tail", "method"]);
            doc.note("sweep", "slope");
            let (mut xs, mut ys) = (Vec::new(), Vec::new());
            for r in geometric(args.min_sep, args.max_sep, args.samples)? {
                let v = ev.eval(&anchor, &point_at_distance(&m, r))?;
                xs.push(r.ln());
                ys.push(v.value.ln());
                doc.push(vec![
                    r.into(),
                    v.value.into(),
                    v.tail.into(),
                    method_name(ev.method()).into(),
                ]);
            }
            let fit = linear_fit(&xs, &ys)?;
            doc.note("slope", fit.slope);
            doc.note("intercept", fit.intercept);
            doc.note("r_squared", fit.r_squared);
            Ok(doc.into())
        }
    }
}

pub fn heat(settings: &Settings, times: &[f64]) -> Result<Outcome, CliError> {
    let points = load_points(settings)?;
    let anchor = base_point(&settings.manifold);
    let mut doc = Document::new("heat", &["t", "index", "distance", "value", "tail", "method"]);
    for &t in times {
        let spec = KernelSpec::heat(t).with_truncation(settings.truncation);
        let ev = evaluator(settings, spec, false)?;
        for (i, p) in points.iter().enumerate() {
            let v = ev.eval(&anchor, p)?;
            doc.push(vec![
                t.into(),
                i.into(),
                distance(&settings.manifold, &anchor, p)?.into(),
                v.value.into(),
                v.tail.into(),
                method_name(ev.method()).into(),
            ]);
        }
    }
    Ok(doc.into())
}

fn parse_curve(value: &str) -> Result<EmbeddedCurve, CliError> {
    let numbers = |rest: &str| -> Result<Vec<f64>, CliError> {
        rest.split(',')
            .map(|x| x.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| CliError::Config(format!("invalid curve {value:?}")))
    };
    match value.split_once(':') {
        Some(("ellipse", rest)) => match numbers(rest)?.as_slice() {
            [a, b] => Ok(EmbeddedCurve::ellipse(*a, *b)?),
            _ => Err(CliError::Config(format!(
                "invalid curve {value:?}: expected ellipse:a,b"
            ))),
        },
        Some(("circle", rest)) => match numbers(rest)?.as_slice() {
            [r] => Ok(EmbeddedCurve::circle(*r)?),
            _ => Err(CliError::Config(format!("invalid curve {value:?}: expected circle:r"))),
        },
        _ => {
            let file = std::fs::File::open(value).map_err(|e| CliError::Config(format!("cannot read {value}: {e}")))?;
            Ok(curve_from_csv(file)?)
        }
    }
}

pub fn curve(settings: &Settings, curve: &str, convention: Convention) -> Result<Outcome, CliError> {
    let c = parse_curve(curve)?;
    let convention = match convention {
        Convention::Explicit => SpectrumConvention::ExplicitSpectrum,
        Convention::Rescale => SpectrumConvention::RescaleMetric,
    };
    let thetas: Vec<f64> = match &settings.points {
        PointSpec::Grid(n) => (0..*n).map(|i| TAU * i as f64 / *n as f64).collect(),
        PointSpec::Random { n, seed } => sample_points(&Manifold::Circle, *n, *seed)
            .into_iter()
            .map(|p| match p {
                Point::Circle(t) => t,
                _ => unreachable!("circle samples"),
            })
            .collect(),
        PointSpec::File(_) => return Err(CliError::Config("curve parameters come from grid:N or random:N".into())),
    };
    let kernel = CurveKernel::new(&c, &settings.spec(), convention)?;
    let iso = isometry_to_circle(&c);
    let mut doc = Document::new("curve", &["theta", "position", "arc_length", "circle_angle", "kernel"]);
    doc.note("length", c.length());
    for &theta in &thetas {
        doc.push(vec![
            theta.into(),
            coords(&c.position(theta)).into(),
            c.arc_length(theta)?.into(),
            iso.angle_of(theta)?.into(),
            kernel.eval(0.0, theta)?.into(),
        ]);
    }
    Ok(doc.into())
}
