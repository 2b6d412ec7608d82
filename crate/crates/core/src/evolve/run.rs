use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graphfeat::BoxKey;
use crate::instance::{rue_instance, Instance, Provenance};
use crate::mutation::mutate;

use super::archive::{Archive, ArchiveKind};
use super::config::{EdoParams, EvolverConfig, EvolverKind};
use super::indicator::{DiversityIndicator, DoubledHypervolume, Igd};
use super::runlog::{EventKind, RunLog};
use super::Problem;

/// Loop settings shared by all evolvers.
#[derive(Debug, Clone, PartialEq)]
pub struct RunParams {
    pub run_id: String,
    pub budget: u64,
    pub mu: usize,
    pub snapshot_every: u64,
    pub seed: u64,
}

impl RunParams {
    pub fn from_config(config: &EvolverConfig) -> Self {
        Self {
            run_id: config.run_id(),
            budget: config.budget,
            mu: config.mu,
            snapshot_every: config.snapshot_every,
            seed: config.seed,
        }
    }
}

/// Population member of the EA-style evolvers.
#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub instance: Instance,
    pub objective: f64,
    pub key: BoxKey,
    /// Iteration the individual was created in (0 for the initial population).
    pub born: u64,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub archive: Archive,
    pub log: RunLog,
    /// Final population; empty for Map-Elites.
    pub population: Vec<Individual>,
    /// Objective evaluations in the main loop; always equals the budget.
    pub evaluations: u64,
    /// Evaluations spent on the initial population.
    pub init_evaluations: u64,
    /// Evaluations spent in the EDO warmup phase.
    pub warmup_evaluations: u64,
}

impl RunOutput {
    pub fn best_objective(&self) -> Option<f64> {
        let archive_best = self.archive.best().map(|(_, e)| e.objective);
        let pop_best = self
            .population
            .iter()
            .map(|i| i.objective)
            .min_by(f64::total_cmp);
        match (archive_best, pop_best) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }
}

struct Engine<'a> {
    problem: &'a Problem,
    params: &'a RunParams,
    rng: &'a mut dyn RngCore,
    archive: Archive,
    log: RunLog,
}

impl<'a> Engine<'a> {
    fn new(problem: &'a Problem, params: &'a RunParams, rng: &'a mut dyn RngCore, kind: ArchiveKind) -> Self {
        Self {
            archive: Archive::new(params.run_id.clone(), problem.features.id(), kind),
            log: RunLog::new(params.run_id.clone()),
            problem,
            params,
            rng,
        }
    }

    fn random_instance(&mut self) -> Result<Instance> {
        Ok(rue_instance(self.problem.n, self.rng)?.with_meta(Provenance {
            seed: Some(self.params.seed),
            iteration: Some(0),
            ..Default::default()
        }))
    }

    fn mutant(&mut self, parent: &Instance, iteration: u64) -> Instance {
        let child = mutate(parent, &self.problem.suite, self.rng);
        let meta = child.meta().cloned().unwrap_or_default();
        child.with_meta(Provenance {
            iteration: Some(iteration),
            ..meta
        })
    }

    fn objective(&mut self, instance: &Instance) -> f64 {
        self.problem.objective.evaluate(instance, self.rng)
    }

    fn evaluate(&mut self, instance: &Instance) -> Result<(f64, BoxKey)> {
        let f = self.objective(instance);
        let key = self.problem.features.key(instance)?;
        Ok((f, key))
    }

    fn offer(&mut self, iteration: u64, key: BoxKey, instance: &Instance, f: f64) -> EventKind {
        let kind = self.archive.offer(key.clone(), instance, f, iteration);
        if cfg!(debug_assertions) && kind == EventKind::Update && iteration % 100 == 0 {
            debug_assert_eq!(self.problem.features.key(instance).ok().as_ref(), Some(&key));
        }
        self.log.push(iteration, kind, key, f);
        kind
    }

    fn tick(&mut self, iteration: u64) {
        if iteration % self.params.snapshot_every == 0 {
            self.log.snapshot(iteration);
        }
    }

    fn pick(&mut self, len: usize) -> usize {
        if len == 1 {
            0
        } else {
            self.rng.random_range(0..len)
        }
    }

    fn finish(mut self, population: Vec<Individual>, init_evaluations: u64, warmup_evaluations: u64) -> RunOutput {
        self.log.snapshot(self.params.budget);
        RunOutput {
            archive: self.archive,
            log: self.log,
            population,
            evaluations: self.params.budget,
            init_evaluations,
            warmup_evaluations,
        }
    }
}

/// Map-Elites: start from one random instance; every iteration mutates the
/// elite of a uniformly chosen covered box and offers the mutant to the
/// archive.
pub fn evolve_qd(problem: &Problem, params: &RunParams, rng: &mut dyn RngCore) -> Result<RunOutput> {
    let mut e = Engine::new(problem, params, rng, ArchiveKind::Elites);
    let first = e.random_instance()?;
    let (f, key) = e.evaluate(&first)?;
    e.offer(0, key, &first, f);
    e.tick(0);

    for it in 1..=params.budget {
        let parent = {
            let key = e.archive.sample_key(e.rng)?;
            e.archive.get(key).expect("sampled key is covered").instance.clone()
        };
        let child = e.mutant(&parent, it);
        let (f, key) = e.evaluate(&child)?;
        e.offer(it, key, &child, f);
        e.tick(it);
    }
    Ok(e.finish(Vec::new(), 1, 0))
}

/// (mu+1) EA: a uniformly chosen parent is replaced by its mutant iff the
/// mutant is not worse. Every evaluation is also offered to the archive,
/// which is an elite archive or a passive footprint depending on `kind`.
pub fn evolve_ea(
    problem: &Problem,
    params: &RunParams,
    rng: &mut dyn RngCore,
    kind: ArchiveKind,
) -> Result<RunOutput> {
    if params.mu == 0 {
        return Err(Error::InvalidParameter("mu must be >= 1".into()));
    }
    let mut e = Engine::new(problem, params, rng, kind);
    let mut population = Vec::with_capacity(params.mu);
    for _ in 0..params.mu {
        let inst = e.random_instance()?;
        let (f, key) = e.evaluate(&inst)?;
        e.offer(0, key.clone(), &inst, f);
        population.push(Individual {
            instance: inst,
            objective: f,
            key,
            born: 0,
        });
    }
    e.tick(0);

    for it in 1..=params.budget {
        let idx = e.pick(population.len());
        let child = e.mutant(&population[idx].instance, it);
        let (f, key) = e.evaluate(&child)?;
        e.offer(it, key.clone(), &child, f);
        if f <= population[idx].objective {
            population[idx] = Individual {
                instance: child,
                objective: f,
                key,
                born: it,
            };
        }
        e.tick(it);
    }
    let init = params.mu as u64;
    Ok(e.finish(population, init, 0))
}

/// Diversity-optimizing EA. A (1+1) EA warmup produces a champion whose
/// clones form the initial population. A mutant may enter only if its
/// objective is within `(1 + alpha)` of the best known value; then the
/// individual whose removal degrades `indicator` least is dropped (ties:
/// oldest, then lowest index).
pub fn evolve_edo(
    problem: &Problem,
    params: &RunParams,
    edo: &EdoParams,
    indicator: &dyn DiversityIndicator,
    rng: &mut dyn RngCore,
) -> Result<RunOutput> {
    if !(edo.alpha > 0.0) {
        return Err(Error::InvalidParameter(format!("alpha must be > 0, got {}", edo.alpha)));
    }
    if params.mu == 0 {
        return Err(Error::InvalidParameter("mu must be >= 1".into()));
    }
    let mut e = Engine::new(problem, params, rng, ArchiveKind::Elites);

    let mut champion = e.random_instance()?;
    let mut champion_f = e.objective(&champion);
    let mut warmup_evaluations = 1;
    for _ in 0..edo.warmup {
        let child = e.mutant(&champion, 0);
        let f = e.objective(&child);
        warmup_evaluations += 1;
        if f <= champion_f {
            champion = child;
            champion_f = f;
        }
    }
    let champion_key = problem.features.key(&champion)?;
    e.offer(0, champion_key.clone(), &champion, champion_f);
    e.tick(0);

    let n = problem.n;
    let champion_point = problem.features.normalize(&champion_key, n)?;
    let mut population: Vec<Individual> = (0..params.mu)
        .map(|_| Individual {
            instance: champion.clone(),
            objective: champion_f,
            key: champion_key.clone(),
            born: 0,
        })
        .collect();
    let mut points: Vec<Vec<f64>> = vec![champion_point; params.mu];
    let mut best_known = champion_f;

    for it in 1..=params.budget {
        let idx = e.pick(population.len());
        let child = e.mutant(&population[idx].instance, it);
        let (f, key) = e.evaluate(&child)?;
        e.offer(it, key.clone(), &child, f);

        if f <= (1.0 + edo.alpha) * best_known {
            points.push(problem.features.normalize(&key, n)?);
            let losses = indicator.removal_losses(&points);
            let removed = least_loss(&losses, |i| {
                if i < population.len() {
                    population[i].born
                } else {
                    it
                }
            });
            let child_point = points.pop().expect("child point was pushed");
            if removed < population.len() {
                population[removed] = Individual {
                    instance: child,
                    objective: f,
                    key,
                    born: it,
                };
                points[removed] = child_point;
                if f < best_known {
                    best_known = f;
                }
            }
        }
        e.tick(it);
    }
    Ok(e.finish(population, 0, warmup_evaluations))
}

fn least_loss(losses: &[f64], born: impl Fn(usize) -> u64) -> usize {
    let mut best = 0;
    for i in 1..losses.len() {
        let better = losses[i] < losses[best] || (losses[i] == losses[best] && born(i) < born(best));
        if better {
            best = i;
        }
    }
    best
}

/// Runs whatever evolver `config` names, seeded from `config.seed`.
pub fn run(config: &EvolverConfig) -> Result<RunOutput> {
    let problem = Problem::from_config(config)?;
    let params = RunParams::from_config(config);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    match config.evolver {
        EvolverKind::Qd => evolve_qd(&problem, &params, &mut rng),
        EvolverKind::Ea => evolve_ea(&problem, &params, &mut rng, ArchiveKind::Footprint),
        EvolverKind::EaArchive => evolve_ea(&problem, &params, &mut rng, ArchiveKind::Elites),
        EvolverKind::EdoIgd | EvolverKind::EdoHv => {
            let arity = config.feature_set.build()?.arity();
            let indicator: Box<dyn DiversityIndicator> = if config.evolver == EvolverKind::EdoIgd {
                Box::new(Igd::new(arity))
            } else {
                Box::new(DoubledHypervolume)
            };
            evolve_edo(&problem, &params, &config.edo, indicator.as_ref(), &mut rng)
        }
    }
}

fn expect_kind(config: &EvolverConfig, allowed: &[EvolverKind]) -> Result<()> {
    if allowed.contains(&config.evolver) {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "evolver {} cannot be run here (expected one of {:?})",
            config.evolver,
            allowed.iter().map(|k| k.id()).collect::<Vec<_>>()
        )))
    }
}

pub fn run_qd(config: &EvolverConfig) -> Result<RunOutput> {
    expect_kind(config, &[EvolverKind::Qd])?;
    run(config)
}

pub fn run_ea(config: &EvolverConfig) -> Result<RunOutput> {
    expect_kind(config, &[EvolverKind::Ea])?;
    run(config)
}

pub fn run_ea_archive(config: &EvolverConfig) -> Result<RunOutput> {
    expect_kind(config, &[EvolverKind::EaArchive])?;
    run(config)
}

pub fn run_edo(config: &EvolverConfig) -> Result<RunOutput> {
    expect_kind(config, &[EvolverKind::EdoIgd, EvolverKind::EdoHv])?;
    run(config)
}
