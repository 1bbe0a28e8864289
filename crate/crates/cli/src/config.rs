//! Flat key=value run configuration with strict key validation.

use fracwill_core::geometry::PlanarCurve;
use fracwill_core::potential::DoubleWell;
use fracwill_core::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subcommand {
    Profile,
    Kernel,
    Constants,
    Expansion,
    Gamma,
}

impl Subcommand {
    fn parse(text: &str) -> Result<Self> {
        Ok(match text {
            "profile" => Subcommand::Profile,
            "kernel" => Subcommand::Kernel,
            "constants" => Subcommand::Constants,
            "expansion" => Subcommand::Expansion,
            "gamma" => Subcommand::Gamma,
            other => {
                return Err(Error::Config(format!(
                    "unknown subcommand '{other}' (profile|kernel|constants|expansion|gamma)"
                )))
            }
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Subcommand::Profile => "profile",
            Subcommand::Kernel => "kernel",
            Subcommand::Constants => "constants",
            Subcommand::Expansion => "expansion",
            Subcommand::Gamma => "gamma",
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub subcommand: Subcommand,
    pub s: f64,
    pub potential: DoubleWell,
    pub curve: PlanarCurve,
    pub ladder: Vec<f64>,
    pub output: String,
    pub grid_half_width: f64,
    pub grid_intervals: usize,
    pub lambda: f64,
    pub cap_lambda: f64,
}

fn parse_curve(text: &str) -> Result<PlanarCurve> {
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        ["circle", r] => {
            let radius = r
                .parse::<f64>()
                .map_err(|e| Error::Config(format!("bad circle radius '{r}': {e}")))?;
            PlanarCurve::circle(radius)
        }
        ["ellipse", a, b] => {
            let pa = a
                .parse::<f64>()
                .map_err(|e| Error::Config(format!("bad ellipse axis '{a}': {e}")))?;
            let pb = b
                .parse::<f64>()
                .map_err(|e| Error::Config(format!("bad ellipse axis '{b}': {e}")))?;
            PlanarCurve::ellipse(pa, pb)
        }
        _ => Err(Error::Config(format!(
            "curve must be 'circle:R' or 'ellipse:a:b', got '{text}'"
        ))),
    }
}

/// Parses the key=value text; '#' starts a comment, unknown keys are
/// rejected with the offending line number, defaults fill the gaps.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut subcommand = Subcommand::Profile;
    let mut s = 0.8;
    let mut potential = DoubleWell::Quartic;
    let mut curve = PlanarCurve::circle(1.0)?;
    let mut ladder: Option<Vec<f64>> = None;
    let mut output: Option<String> = None;
    let mut grid_half_width = 40.0;
    let mut grid_intervals = 4096usize;
    let mut lambda = 1.0;
    let mut cap_lambda = 20.0;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Config(format!("line {line_no}: expected key=value, got '{line}'"))
        })?;
        let key = key.trim();
        let value = value.trim();
        let fnum = |what: &str| -> Result<f64> {
            value
                .parse::<f64>()
                .map_err(|e| Error::Config(format!("line {line_no}: bad {what} '{value}': {e}")))
        };
        match key {
            "subcommand" => {
                subcommand = Subcommand::parse(value)
                    .map_err(|e| Error::Config(format!("line {line_no}: {e}")))?
            }
            "s" => s = fnum("s")?,
            "potential" => {
                potential = DoubleWell::by_name(value)
                    .map_err(|e| Error::Config(format!("line {line_no}: {e}")))?
            }
            "curve" => {
                curve = parse_curve(value)
                    .map_err(|e| Error::Config(format!("line {line_no}: {e}")))?
            }
            "ladder" => {
                let parsed: std::result::Result<Vec<f64>, _> =
                    value.split(',').map(|v| v.trim().parse::<f64>()).collect();
                ladder = Some(parsed.map_err(|e| {
                    Error::Config(format!("line {line_no}: bad ladder '{value}': {e}"))
                })?);
            }
            "output" => output = Some(value.to_string()),
            "l" => grid_half_width = fnum("grid half-width")?,
            "n" => {
                grid_intervals = value.parse::<usize>().map_err(|e| {
                    Error::Config(format!("line {line_no}: bad interval count '{value}': {e}"))
                })?
            }
            "lambda" => lambda = fnum("lambda")?,
            "cap_lambda" => cap_lambda = fnum("cap_lambda")?,
            other => {
                return Err(Error::Config(format!(
                    "line {line_no}: unknown key '{other}'"
                )))
            }
        }
    }

    // regime admissibility per subcommand
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::Config(format!("s must lie in (0, 1), got {s}")));
    }
    match subcommand {
        Subcommand::Gamma | Subcommand::Constants => {
            if s < 0.75 - 1e-12 {
                return Err(Error::Config(format!(
                    "subcommand {} requires s >= 3/4, got {s}",
                    subcommand.name()
                )));
            }
        }
        Subcommand::Expansion => {
            if s <= 0.5 {
                return Err(Error::Config(format!(
                    "subcommand expansion requires s in (1/2, 1), got {s}"
                )));
            }
        }
        _ => {}
    }
    if !(lambda > 0.0) {
        return Err(Error::Config(format!("lambda must be positive, got {lambda}")));
    }
    if !(cap_lambda >= 1.0) {
        return Err(Error::Config(format!("cap_lambda must be >= 1, got {cap_lambda}")));
    }

    let ladder = ladder.unwrap_or_else(|| match subcommand {
        Subcommand::Expansion => vec![0.05, 0.025, 0.0125],
        _ => vec![0.08, 0.04, 0.02],
    });
    if ladder.is_empty() || ladder.iter().any(|&e| !(e > 0.0)) {
        return Err(Error::Config("ladder must hold positive values".into()));
    }
    let output = output.unwrap_or_else(|| format!("{}.csv", subcommand.name()));

    Ok(RunConfig {
        subcommand,
        s,
        potential,
        curve,
        ladder,
        output,
        grid_half_width,
        grid_intervals,
        lambda,
        cap_lambda,
    })
}

impl RunConfig {
    /// Canonical resolved-config line for the reproducibility header.
    pub fn header_line(&self) -> String {
        let curve = match self.curve.kind {
            fracwill_core::geometry::CurveKind::Circle { radius } => format!("circle:{radius}"),
            fracwill_core::geometry::CurveKind::Ellipse { a, b } => format!("ellipse:{a}:{b}"),
        };
        let ladder: Vec<String> = self.ladder.iter().map(|e| format!("{e}")).collect();
        format!(
            "cap_lambda={} curve={curve} l={} ladder={} lambda={} n={} output={} potential={} s={} subcommand={}",
            self.cap_lambda,
            self.grid_half_width,
            ladder.join(","),
            self.lambda,
            self.grid_intervals,
            self.output,
            self.potential.name(),
            self.s,
            self.subcommand.name(),
        )
    }
}
