pub mod envelope;
pub mod experiments;
pub mod fit;
pub mod interp;
pub mod maxineq;
pub mod predict;
pub mod tables;

use std::path::Path;

use clap::ValueEnum;
use heavyls::{ClassKind, ShapeClass, Truth};
use serde_json::Value;

use crate::error::{bad_arg, CliResult};
use crate::manifest::Manifest;

/// What a command produced: text for stdout plus named files for the output directory.
#[derive(Debug, Default)]
pub struct Output {
    pub command: String,
    pub stdout: String,
    pub files: Vec<(String, String)>,
    pub config: Value,
    pub seeds: Vec<u64>,
    pub warnings: Vec<String>,
    pub degraded: bool,
}

impl Output {
    pub fn new(command: &str, stdout: String) -> Self {
        Self { command: command.into(), stdout, ..Default::default() }
    }

    pub fn file(mut self, name: &str, contents: String) -> Self {
        self.files.push((name.into(), contents));
        self
    }

    pub fn write_to(&self, dir: &Path, args: Vec<String>) -> CliResult<()> {
        std::fs::create_dir_all(dir)?;
        for (name, contents) in &self.files {
            std::fs::write(dir.join(name), contents)?;
        }
        let outputs = self.files.iter().map(|(n, _)| n.clone()).collect();
        Manifest::new(&self.command, args, self.config.clone(), self.seeds.clone(), outputs).write(dir)?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ClassName {
    Isotonic,
    Monotone,
    Convex,
    Lipschitz,
    Holder,
}

#[derive(Debug, Clone, clap::Args)]
pub struct ClassArgs {
    #[arg(long, value_enum)]
    pub class: ClassName,
    /// Sup-norm bound on the class.
    #[arg(long)]
    pub phi: Option<f64>,
    /// Hölder exponent in (0, 1].
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Hölder or Lipschitz constant.
    #[arg(long)]
    pub lip: Option<f64>,
}

impl ClassArgs {
    pub fn class(&self) -> CliResult<ShapeClass> {
        let kind = match self.class {
            ClassName::Isotonic | ClassName::Monotone => ClassKind::Monotone,
            ClassName::Convex => ClassKind::Convex,
            ClassName::Lipschitz => {
                if self.gamma.is_some_and(|g| g != 1.0) {
                    return Err(bad_arg("the lipschitz class has gamma = 1"));
                }
                ClassKind::Holder { gamma: 1.0, lip: self.lip.unwrap_or(1.0) }
            }
            ClassName::Holder => ClassKind::Holder {
                gamma: self.gamma.ok_or_else(|| bad_arg("--class holder needs --gamma"))?,
                lip: self.lip.unwrap_or(1.0),
            },
        };
        if matches!(kind, ClassKind::Monotone | ClassKind::Convex) && (self.gamma.is_some() || self.lip.is_some()) {
            return Err(bad_arg("--gamma and --lip apply only to lipschitz and holder classes"));
        }
        Ok(ShapeClass::new(kind, self.phi)?)
    }
}

/// A truth function by name, or `constant:v`, or `linear:a,b`.
pub fn parse_truth(s: &str) -> CliResult<Truth> {
    if let Some(v) = s.strip_prefix("constant:") {
        let value = v.trim().parse().map_err(|_| bad_arg(format!("bad constant in `{s}`")))?;
        return Ok(Truth::Constant { value });
    }
    if let Some(rest) = s.strip_prefix("linear:") {
        let parts: Vec<f64> = rest.split(',').map(|p| p.trim().parse()).collect::<Result<_, _>>().map_err(|_| bad_arg(format!("bad coefficients in `{s}`")))?;
        if let [intercept, slope] = parts[..] {
            return Ok(Truth::Linear { intercept, slope });
        }
        return Err(bad_arg(format!("`{s}` needs an intercept and a slope")));
    }
    Truth::from_name(s).ok_or_else(|| bad_arg(format!("unknown truth function `{s}`")))
}

pub fn to_json<T: serde::Serialize>(v: &T) -> CliResult<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}
