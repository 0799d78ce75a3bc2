//! Complete runnable problem descriptions and the time loop that drives them.

use serde::{Deserialize, Serialize};

use crate::energy::{discrete_energy, interior_energy};
use crate::error::{Error, Result};
use crate::field::FieldState;
use crate::grid::{Grid, GridSpec};
use crate::medium::{cfl_dt, Medium, MediumSpec};
use crate::pml::{
    build_pml_maps, step_nonpml_absorber, step_pml, AbsorberMode, PmlCoefficients, PmlSpec,
};
use crate::probe::{ProbeData, ProbeRecorder, ProbeSpec};
use crate::source::{ResolvedSource, SourceSpec};
use crate::stepper::step_plain;

/// Fields are checked for NaN/Inf this often.
pub const FINITENESS_CHECK_INTERVAL: u64 = 100;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Duration {
    Time(f64),
    Steps(u64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub grid: GridSpec,
    pub medium: MediumSpec,
    pub absorbers: PmlSpec,
    pub sources: Vec<SourceSpec>,
    pub probes: Vec<ProbeSpec>,
    pub duration: Duration,
    pub safety: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepperKind {
    Plain,
    Pml,
    NonpmlScalar,
}

pub struct Simulation {
    pub grid: Grid,
    pub medium: Medium,
    pub coeffs: PmlCoefficients,
    pub state: FieldState,
    pub dt: f64,
    pub stepper: StepperKind,
    pub total_steps: u64,
    pub sources: Vec<ResolvedSource>,
    pub probes: Vec<ProbeRecorder>,
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub dt: f64,
    pub steps: u64,
    pub probes: Vec<ProbeRecorder>,
}

impl RunOutput {
    pub fn probe(&self, name: &str) -> Option<&ProbeData> {
        self.probes
            .iter()
            .find(|p| p.spec.name == name)
            .map(|p| &p.data)
    }
}

impl Simulation {
    pub fn new(scenario: &Scenario) -> Result<Self> {
        let grid = scenario.grid.build()?;
        let medium = Medium::from_spec(&grid, &scenario.medium)?;
        let coeffs = build_pml_maps(&grid, &scenario.absorbers)?;
        let dt = cfl_dt(&grid, &medium, scenario.safety)?;
        let stepper = match scenario.absorbers.mode()? {
            None => StepperKind::Plain,
            Some(AbsorberMode::Pml) => StepperKind::Pml,
            Some(AbsorberMode::NonpmlScalar) => StepperKind::NonpmlScalar,
        };
        let total_steps = match scenario.duration {
            Duration::Steps(n) => n,
            Duration::Time(t) => {
                if !(t >= 0.0 && t.is_finite()) {
                    return Err(Error::InvalidArgument(format!("invalid duration {t}")));
                }
                (t / dt - 1e-9).ceil().max(0.0) as u64
            }
        };
        let sources = scenario
            .sources
            .iter()
            .map(|s| {
                let r = ResolvedSource::new(&grid, s)?;
                for &(c, _) in &r.cells {
                    let (i, j) = (c % grid.nx, c / grid.nx);
                    if !(coeffs.x_is_quiet_u(i) && (!grid.is_2d() || coeffs.y_is_quiet_u(j))) {
                        return Err(Error::InvalidSource(format!(
                            "source at {:?} lies inside an absorber",
                            s.position
                        )));
                    }
                }
                Ok(r)
            })
            .collect::<Result<Vec<_>>>()?;
        let probes = scenario
            .probes
            .iter()
            .map(|p| ProbeRecorder::new(&grid, p, dt))
            .collect::<Result<Vec<_>>>()?;
        let state = if stepper == StepperKind::Pml {
            FieldState::with_auxiliaries(&grid)
        } else {
            FieldState::zeros(&grid)
        };
        let mut sim = Simulation {
            grid,
            medium,
            coeffs,
            state,
            dt,
            stepper,
            total_steps,
            sources,
            probes,
        };
        sim.record();
        Ok(sim)
    }

    pub fn time(&self) -> f64 {
        self.state.step as f64 * self.dt
    }

    fn record(&mut self) {
        let t = self.time();
        for p in &mut self.probes {
            p.record(&self.state, &self.grid, t);
        }
    }

    /// One leap-frog cycle, then sources at the new time, then probes.
    pub fn advance(&mut self) {
        match self.stepper {
            StepperKind::Plain => step_plain(&mut self.state, &self.medium, &self.grid, self.dt),
            StepperKind::Pml => step_pml(
                &mut self.state,
                &self.medium,
                &self.coeffs,
                &self.grid,
                self.dt,
            ),
            StepperKind::NonpmlScalar => step_nonpml_absorber(
                &mut self.state,
                &self.medium,
                &self.coeffs,
                &self.grid,
                self.dt,
            ),
        }
        let t = self.time();
        for s in &self.sources {
            s.apply(&mut self.state, t, self.dt);
        }
        self.record();
    }

    pub fn run(&mut self) -> Result<()> {
        self.run_with(|_| Ok(()))
    }

    /// Runs to `total_steps`, calling `observer` after every step.
    pub fn run_with(&mut self, mut observer: impl FnMut(&Simulation) -> Result<()>) -> Result<()> {
        while self.state.step < self.total_steps {
            self.advance();
            if self.state.step.is_multiple_of(FINITENESS_CHECK_INTERVAL) && !self.state.is_finite()
            {
                return Err(Error::Instability {
                    step: self.state.step,
                });
            }
            observer(self)?;
        }
        if !self.state.is_finite() {
            return Err(Error::Instability {
                step: self.state.step,
            });
        }
        Ok(())
    }

    pub fn energy(&self) -> f64 {
        discrete_energy(&self.state, &self.medium, &self.grid)
    }

    pub fn interior_energy(&self) -> f64 {
        interior_energy(&self.state, &self.medium, &self.grid, &self.coeffs)
    }

    pub fn into_output(self) -> RunOutput {
        RunOutput {
            dt: self.dt,
            steps: self.state.step,
            probes: self.probes,
        }
    }
}

impl Scenario {
    pub fn run(&self) -> Result<RunOutput> {
        let mut sim = Simulation::new(self)?;
        sim.run()?;
        Ok(sim.into_output())
    }

    /// Duration as an absolute time, given the step size.
    pub fn duration_time(&self, dt: f64) -> f64 {
        match self.duration {
            Duration::Time(t) => t,
            Duration::Steps(n) => n as f64 * dt,
        }
    }
}
