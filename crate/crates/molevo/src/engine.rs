//! Generational evolutionary loop: population management, NSGA-II
//! non-dominated selection with crowding, the two run modes, and
//! deterministic history logging.
//!
//! Evaluation is an embarrassingly parallel map over individuals.
//! Every stochastic step draws from a stream keyed by
//! `(seed, generation, stream_id)`, so results are bit-identical
//! regardless of worker count or scheduling.

use crate::error::{MolevoError, Result};
use crate::filter::{check, FilterConfig, FilterVerdict};
use crate::genome::{random_dna, translate, write_fasta, Dna, Protein};
use crate::mutation::{mutate_individual, recombine, recombine_codon_aligned, MutationRates};
use crate::objectives::{
    compile_objectives, evaluate, CompiledObjective, ObjectiveSpec, ObjectiveVector, PkaSet,
};
use crate::rng::{derive_rng_stream, RngStream};
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

/// Stream-id namespace for pair-level draws (selection + crossover),
/// disjoint from per-child mutation stream ids.
const PAIR_STREAM_BASE: u64 = 1 << 40;

/// One member of the population with its cached evaluation state.
#[derive(Debug, Clone)]
pub struct Individual {
    pub genome: Dna,
    pub protein: Protein,
    pub objectives: ObjectiveVector,
    pub verdict: FilterVerdict,
    pub rank: usize,
    pub crowding: f64,
    pub lineage_id: u64,
}

/// Which end of the search the run starts from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunMode {
    /// Evolve random sequence toward a known family.
    UnknownToKnown,
    /// Forward-evolve a known gene toward a new phenotype.
    KnownToUnknown,
}

/// Full declarative experiment description.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub mode: RunMode,
    pub seed: u64,
    pub population_size: usize,
    pub generations: usize,
    /// Initial genome length in nt (unknown_to_known only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_length: Option<usize>,
    /// Source gene to forward-evolve (known_to_unknown only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_gene: Option<String>,
    #[serde(default)]
    pub rates: MutationRates,
    pub objectives: Vec<ObjectiveSpec>,
    #[serde(default)]
    pub filter: FilterConfig,
    #[serde(default)]
    pub pka: PkaSet,
    #[serde(default = "default_tournament_size")]
    pub tournament_size: usize,
    /// Finite floor standing in for -inf on filter-rejected individuals.
    #[serde(default = "default_worst_objective")]
    pub worst_objective: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

fn default_tournament_size() -> usize {
    2
}
fn default_worst_objective() -> f64 {
    -1e9
}

impl RunConfig {
    /// Check every field, reporting the first invalid one by name.
    pub fn validate(&self) -> Result<()> {
        let err = |field: &str, message: String| {
            Err(MolevoError::Config {
                field: field.to_string(),
                message,
            })
        };
        if self.population_size < 4 || self.population_size % 2 != 0 {
            return err(
                "population_size",
                format!("must be an even integer >= 4, got {}", self.population_size),
            );
        }
        match self.mode {
            RunMode::UnknownToKnown => {
                if self.source_gene.is_some() {
                    return err("source_gene", "not allowed in unknown_to_known mode".into());
                }
                match self.initial_length {
                    None => return err("initial_length", "required in unknown_to_known mode".into()),
                    Some(0) => return err("initial_length", "must be >= 1".into()),
                    Some(_) => {}
                }
            }
            RunMode::KnownToUnknown => {
                if self.initial_length.is_some() {
                    return err("initial_length", "not allowed in known_to_unknown mode".into());
                }
                match &self.source_gene {
                    None => return err("source_gene", "required in known_to_unknown mode".into()),
                    Some(g) => {
                        if g.is_empty() {
                            return err("source_gene", "must be nonempty".into());
                        }
                        if let Err(e) = Dna::new(g) {
                            return err("source_gene", e.to_string());
                        }
                    }
                }
            }
        }
        if let Err(m) = self.rates.validate() {
            return err("rates", m);
        }
        if self.objectives.is_empty() {
            return err("objectives", "at least one objective is required".into());
        }
        if let Err(m) = self.pka.validate() {
            return err("pka", m);
        }
        if let Err(e) = compile_objectives(&self.objectives, &self.pka) {
            return err("objectives", e.to_string());
        }
        if let Err(m) = self.filter.validate() {
            return err("filter", m);
        }
        if self.tournament_size < 2 {
            return err("tournament_size", "must be >= 2".into());
        }
        if !self.worst_objective.is_finite() {
            return err("worst_objective", "must be finite".into());
        }
        Ok(())
    }
}

/// True iff `a` Pareto-dominates `b` under maximization.
pub fn dominates(a: &ObjectiveVector, b: &ObjectiveVector) -> Result<bool> {
    if a.len() != b.len() {
        return Err(MolevoError::VectorLength {
            left: a.len(),
            right: b.len(),
        });
    }
    let mut strict = false;
    for (x, y) in a.values().iter().zip(b.values()) {
        if x < y {
            return Ok(false);
        }
        if x > y {
            strict = true;
        }
    }
    Ok(strict)
}

/// Fast non-dominated sorting. Front 0 holds the maximal elements;
/// front k the maximal elements once fronts < k are removed. Every
/// index appears in exactly one front.
pub fn non_dominated_sort(pop: &[ObjectiveVector]) -> Vec<Vec<usize>> {
    let n = pop.len();
    let mut dominated_by: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut domination_count = vec![0usize; n];
    for i in 0..n {
        for j in (i + 1)..n {
            if dominates(&pop[i], &pop[j]).unwrap() {
                dominated_by[i].push(j);
                domination_count[j] += 1;
            } else if dominates(&pop[j], &pop[i]).unwrap() {
                dominated_by[j].push(i);
                domination_count[i] += 1;
            }
        }
    }
    let mut fronts: Vec<Vec<usize>> = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| domination_count[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominated_by[i] {
                domination_count[j] -= 1;
                if domination_count[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(std::mem::take(&mut current));
        current = next;
    }
    fronts
}

/// NSGA-II crowding distance within one front. Boundary solutions per
/// objective get infinity; a zero objective range contributes nothing.
pub fn crowding_distance(front: &[ObjectiveVector]) -> Vec<f64> {
    let n = front.len();
    assert!(n > 0);
    if n <= 2 {
        return vec![f64::INFINITY; n];
    }
    let m = front[0].len();
    let mut dist = vec![0.0f64; n];
    for obj in 0..m {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            front[a].values()[obj]
                .partial_cmp(&front[b].values()[obj])
                .unwrap()
                .then(a.cmp(&b))
        });
        let lo = front[order[0]].values()[obj];
        let hi = front[order[n - 1]].values()[obj];
        dist[order[0]] = f64::INFINITY;
        dist[order[n - 1]] = f64::INFINITY;
        let range = hi - lo;
        if range > 0.0 {
            for w in 1..n - 1 {
                let gap =
                    front[order[w + 1]].values()[obj] - front[order[w - 1]].values()[obj];
                dist[order[w]] += gap / range;
            }
        }
    }
    dist
}

/// Binary-and-up tournament: draw `k` with replacement, keep the
/// candidate with the lowest rank, then the largest crowding distance,
/// then the lowest index.
pub fn tournament_select<'a>(
    pop: &'a [Individual],
    k: usize,
    rng: &mut RngStream,
) -> &'a Individual {
    assert!(!pop.is_empty());
    let mut best = rng.below(pop.len());
    for _ in 1..k {
        let c = rng.below(pop.len());
        let better = match pop[c].rank.cmp(&pop[best].rank) {
            std::cmp::Ordering::Less => true,
            std::cmp::Ordering::Greater => false,
            std::cmp::Ordering::Equal => match pop[c]
                .crowding
                .partial_cmp(&pop[best].crowding)
                .unwrap()
            {
                std::cmp::Ordering::Greater => true,
                std::cmp::Ordering::Less => false,
                std::cmp::Ordering::Equal => c < best,
            },
        };
        if better {
            best = c;
        }
    }
    &pop[best]
}

/// Compiled, validated run state shared across generations.
#[derive(Debug)]
pub struct Engine {
    config: RunConfig,
    objectives: Vec<CompiledObjective>,
}

/// Per-generation summary row.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub generation: usize,
    /// Best value per objective over accepted individuals (NaN if none).
    pub best: Vec<f64>,
    /// Mean value per objective over accepted individuals (NaN if none).
    pub mean: Vec<f64>,
    pub front0_size: usize,
    pub reject_frac: f64,
    /// Running FNV-64 checksum over population genomes.
    pub checksum: String,
}

/// The per-generation log of one run.
#[derive(Debug, Clone, Serialize, Deserialize, Default)]
pub struct RunHistory {
    pub records: Vec<GenerationRecord>,
}

/// Everything a completed run returns.
pub struct RunOutput {
    pub population: Vec<Individual>,
    /// Clones of the rank-0 individuals.
    pub pareto_front: Vec<Individual>,
    pub history: RunHistory,
}

fn fnv64_update(mut hash: u64, bytes: &[u8]) -> u64 {
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x100_0000_01b3);
    }
    hash
}

const FNV64_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;

impl Engine {
    pub fn new(config: RunConfig) -> Result<Engine> {
        config.validate()?;
        let objectives = compile_objectives(&config.objectives, &config.pka)?;
        Ok(Engine { config, objectives })
    }

    pub fn config(&self) -> &RunConfig {
        &self.config
    }

    /// Translate, filter and score one genome. Filter rejection and
    /// evaluation failure both map to the worst-case vector so the
    /// population size stays constant.
    pub fn evaluate_genome(&self, genome: Dna, lineage_id: u64) -> Individual {
        let protein = translate(&genome, 0);
        let verdict = check(&protein, &self.config.filter);
        let objectives = if verdict.accepted {
            match evaluate(&protein, &self.objectives, &self.config.pka) {
                Ok(v) => v,
                Err(_) => self.worst_vector(),
            }
        } else {
            self.worst_vector()
        };
        Individual {
            genome,
            protein,
            objectives,
            verdict,
            rank: usize::MAX,
            crowding: 0.0,
            lineage_id,
        }
    }

    fn worst_vector(&self) -> ObjectiveVector {
        ObjectiveVector(vec![self.config.worst_objective; self.objectives.len()])
    }

    /// Sequential population evaluation.
    pub fn evaluate_genomes_seq(&self, genomes: Vec<(Dna, u64)>) -> Vec<Individual> {
        genomes
            .into_iter()
            .map(|(g, lineage)| self.evaluate_genome(g, lineage))
            .collect()
    }

    /// Parallel population evaluation; order-preserving, bit-identical
    /// to the sequential path.
    #[cfg(feature = "parallel")]
    pub fn evaluate_genomes_par(&self, genomes: Vec<(Dna, u64)>) -> Vec<Individual> {
        use rayon::prelude::*;
        genomes
            .into_par_iter()
            .map(|(g, lineage)| self.evaluate_genome(g, lineage))
            .collect()
    }

    fn evaluate_genomes(&self, genomes: Vec<(Dna, u64)>) -> Vec<Individual> {
        #[cfg(feature = "parallel")]
        {
            self.evaluate_genomes_par(genomes)
        }
        #[cfg(not(feature = "parallel"))]
        {
            self.evaluate_genomes_seq(genomes)
        }
    }

    /// Assign within-population ranks and crowding distances.
    fn assign_ranks(&self, pop: &mut [Individual]) {
        let vectors: Vec<ObjectiveVector> = pop.iter().map(|i| i.objectives.clone()).collect();
        for (rank, front) in non_dominated_sort(&vectors).into_iter().enumerate() {
            let front_vectors: Vec<ObjectiveVector> =
                front.iter().map(|&i| vectors[i].clone()).collect();
            let crowding = crowding_distance(&front_vectors);
            for (slot, &i) in front.iter().enumerate() {
                pop[i].rank = rank;
                pop[i].crowding = crowding[slot];
            }
        }
    }

    /// Breed one pair of children. All draws come from streams keyed by
    /// the pair index, so pairs are independent of one another.
    fn breed_pair(&self, pop: &[Individual], gen: usize, pair: usize) -> [(Dna, u64); 2] {
        let cfg = &self.config;
        let mut rng = derive_rng_stream(cfg.seed, gen as u64, PAIR_STREAM_BASE + pair as u64);
        let a = tournament_select(pop, cfg.tournament_size, &mut rng);
        let b = tournament_select(pop, cfg.tournament_size, &mut rng);
        let (c1, c2) = if rng.chance(cfg.rates.crossover_prob) {
            if cfg.rates.codon_aligned_crossover {
                recombine_codon_aligned(&a.genome, &b.genome, &mut rng)
            } else {
                recombine(&a.genome, &b.genome, &mut rng)
            }
        } else {
            (a.genome.clone(), b.genome.clone())
        };
        [(c1, a.lineage_id), (c2, b.lineage_id)]
    }

    /// Produce the next generation: tournament pairs, crossover,
    /// per-child mutation, evaluation, then elitist combined truncation
    /// of parents + offspring back to the configured size.
    pub fn step_generation(&self, pop: Vec<Individual>, gen_index: usize) -> Vec<Individual> {
        let cfg = &self.config;
        let n = cfg.population_size;
        debug_assert_eq!(pop.len(), n);

        let pairs = n / 2;
        let bred: Vec<[(Dna, u64); 2]> = {
            #[cfg(feature = "parallel")]
            {
                use rayon::prelude::*;
                (0..pairs)
                    .into_par_iter()
                    .map(|p| self.breed_pair(&pop, gen_index, p))
                    .collect()
            }
            #[cfg(not(feature = "parallel"))]
            {
                (0..pairs).map(|p| self.breed_pair(&pop, gen_index, p)).collect()
            }
        };
        let mut offspring_genomes: Vec<(Dna, u64)> = Vec::with_capacity(n);
        for pair in bred {
            offspring_genomes.extend(pair);
        }
        // mutation stream id is the child index within the generation
        let mutated: Vec<(Dna, u64)> = {
            let mutate_one = |(i, (g, lineage)): (usize, (Dna, u64))| {
                let mut rng = derive_rng_stream(cfg.seed, gen_index as u64, i as u64);
                (mutate_individual(&g, &cfg.rates, &mut rng), lineage)
            };
            #[cfg(feature = "parallel")]
            {
                use rayon::prelude::*;
                offspring_genomes
                    .into_par_iter()
                    .enumerate()
                    .map(mutate_one)
                    .collect()
            }
            #[cfg(not(feature = "parallel"))]
            {
                offspring_genomes.into_iter().enumerate().map(mutate_one).collect()
            }
        };
        let offspring = self.evaluate_genomes(mutated);

        // combined elitist truncation on parents + offspring
        let mut combined = pop;
        combined.extend(offspring);
        let vectors: Vec<ObjectiveVector> =
            combined.iter().map(|i| i.objectives.clone()).collect();
        let fronts = non_dominated_sort(&vectors);
        let mut rank = vec![0usize; combined.len()];
        let mut crowd = vec![0.0f64; combined.len()];
        for (r, front) in fronts.iter().enumerate() {
            let front_vectors: Vec<ObjectiveVector> =
                front.iter().map(|&i| vectors[i].clone()).collect();
            let cd = crowding_distance(&front_vectors);
            for (slot, &i) in front.iter().enumerate() {
                rank[i] = r;
                crowd[i] = cd[slot];
            }
        }
        // Exact genome clones carry no new information; the first
        // occurrence (lowest index, parents before offspring) is the
        // primary and the rest only fill leftover slots. This keeps the
        // genome multiset invariant when all variation rates are zero.
        let mut seen: std::collections::HashMap<&str, usize> = std::collections::HashMap::new();
        let mut is_clone = vec![false; combined.len()];
        for (i, ind) in combined.iter().enumerate() {
            if seen.contains_key(ind.genome.bases()) {
                is_clone[i] = true;
            } else {
                seen.insert(ind.genome.bases(), i);
            }
        }
        // Crowding ties are broken by a generation-salted genome hash
        // rather than raw index. An index tie-break always favors
        // incumbents, so once a front outgrows the population size no
        // new equal-fitness variant can ever enter and neutral drift
        // stalls. The salted hash reshuffles the tied region every
        // generation while staying deterministic.
        let tie_key: Vec<u64> = combined
            .iter()
            .map(|ind| {
                let h = fnv64_update(FNV64_OFFSET, ind.genome.bases().as_bytes());
                (h ^ (gen_index as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15))
                    .wrapping_mul(0xd6e8_feb8_6659_fd93)
            })
            .collect();
        let mut order: Vec<usize> = (0..combined.len()).collect();
        order.sort_by(|&a, &b| {
            is_clone[a]
                .cmp(&is_clone[b])
                .then_with(|| {
                    if is_clone[a] {
                        a.cmp(&b)
                    } else {
                        rank[a]
                            .cmp(&rank[b])
                            .then(crowd[b].partial_cmp(&crowd[a]).unwrap())
                            .then(tie_key[a].cmp(&tie_key[b]))
                            .then(a.cmp(&b))
                    }
                })
        });
        let mut keep: Vec<usize> = order.into_iter().take(n).collect();
        keep.sort_unstable();
        let mut kept = Vec::with_capacity(n);
        let mut taken = 0usize;
        for (i, ind) in combined.into_iter().enumerate() {
            if taken < keep.len() && keep[taken] == i {
                kept.push(ind);
                taken += 1;
            }
        }
        self.assign_ranks(&mut kept);
        kept
    }

    fn record(&self, pop: &[Individual], generation: usize, prev_checksum: u64) -> (GenerationRecord, u64) {
        let m = self.objectives.len();
        let mut best = vec![f64::NAN; m];
        let mut mean = vec![0.0f64; m];
        let mut accepted = 0usize;
        for ind in pop {
            if ind.verdict.accepted {
                accepted += 1;
                for (k, &v) in ind.objectives.values().iter().enumerate() {
                    if best[k].is_nan() || v > best[k] {
                        best[k] = v;
                    }
                    mean[k] += v;
                }
            }
        }
        if accepted > 0 {
            for v in mean.iter_mut() {
                *v /= accepted as f64;
            }
        } else {
            mean = vec![f64::NAN; m];
        }
        let mut checksum = prev_checksum;
        for ind in pop {
            checksum = fnv64_update(checksum, ind.genome.as_bytes());
            checksum = fnv64_update(checksum, b"\n");
        }
        let record = GenerationRecord {
            generation,
            best,
            mean,
            front0_size: pop.iter().filter(|i| i.rank == 0).count(),
            reject_frac: (pop.len() - accepted) as f64 / pop.len() as f64,
            checksum: format!("{checksum:016x}"),
        };
        (record, checksum)
    }

    fn initial_genomes(&self) -> Result<Vec<(Dna, u64)>> {
        let cfg = &self.config;
        let n = cfg.population_size;
        match cfg.mode {
            RunMode::UnknownToKnown => {
                let len = cfg.initial_length.unwrap();
                (0..n)
                    .map(|i| {
                        let mut rng = derive_rng_stream(cfg.seed, 0, i as u64);
                        Ok((random_dna(len, &mut rng)?, i as u64))
                    })
                    .collect()
            }
            RunMode::KnownToUnknown => {
                let source = Dna::new(cfg.source_gene.as_ref().unwrap())?;
                // forced variation pass so generation 0 is not degenerate
                Ok((0..n)
                    .map(|i| {
                        let mut rng = derive_rng_stream(cfg.seed, 0, i as u64);
                        (mutate_individual(&source, &cfg.rates, &mut rng), i as u64)
                    })
                    .collect())
            }
        }
    }

    /// Run the full loop and return the final population, its Pareto
    /// front, and the per-generation history. Writes output files when
    /// `output_dir` is configured.
    pub fn run(&self) -> Result<RunOutput> {
        self.run_with_progress(|_| {})
    }

    /// As `run`, invoking `progress` with each generation record.
    pub fn run_with_progress(
        &self,
        mut progress: impl FnMut(&GenerationRecord),
    ) -> Result<RunOutput> {
        let mut pop = self.evaluate_genomes(self.initial_genomes()?);
        self.assign_ranks(&mut pop);
        let mut history = RunHistory::default();
        let mut checksum = FNV64_OFFSET;
        let (rec, chk) = self.record(&pop, 0, checksum);
        checksum = chk;
        progress(&rec);
        history.records.push(rec);
        for gen in 1..=self.config.generations {
            pop = self.step_generation(pop, gen);
            let (rec, chk) = self.record(&pop, gen, checksum);
            checksum = chk;
            progress(&rec);
            history.records.push(rec);
        }
        let pareto_front: Vec<Individual> =
            pop.iter().filter(|i| i.rank == 0).cloned().collect();
        let output = RunOutput {
            population: pop,
            pareto_front,
            history,
        };
        if let Some(dir) = &self.config.output_dir {
            self.write_outputs(dir, &output)?;
        }
        Ok(output)
    }

    fn write_outputs(&self, dir: &PathBuf, output: &RunOutput) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(
            dir.join("config_echo.json"),
            serde_json::to_string_pretty(&self.config)? + "\n",
        )?;
        std::fs::write(dir.join("history.csv"), history_csv(&output.history))?;
        let dna_records: Vec<(String, String)> = output
            .population
            .iter()
            .enumerate()
            .map(|(i, ind)| (format!("ind_{i}"), ind.genome.bases().to_string()))
            .collect();
        std::fs::write(dir.join("final_dna.fasta"), write_fasta(&dna_records, 60)?)?;
        let protein_records: Vec<(String, String)> = output
            .population
            .iter()
            .enumerate()
            .map(|(i, ind)| {
                let id = if ind.protein.truncated {
                    format!("ind_{i} truncated=true")
                } else {
                    format!("ind_{i}")
                };
                (id, ind.protein.residues().to_string())
            })
            .collect();
        std::fs::write(
            dir.join("final_proteins.fasta"),
            write_fasta(&protein_records, 60)?,
        )?;
        let pareto: Vec<serde_json::Value> = output
            .pareto_front
            .iter()
            .map(|ind| {
                serde_json::json!({
                    "dna": ind.genome.bases(),
                    "protein": ind.protein.residues(),
                    "objectives": ind.objectives.values(),
                    "rank": 0,
                })
            })
            .collect();
        std::fs::write(
            dir.join("pareto.json"),
            serde_json::to_string_pretty(&pareto)? + "\n",
        )?;
        Ok(())
    }
}

/// Render a history as CSV, one row per generation including
/// generation 0.
pub fn history_csv(history: &RunHistory) -> String {
    let m = history
        .records
        .first()
        .map(|r| r.best.len())
        .unwrap_or(0);
    let mut out = String::from("generation");
    for i in 0..m {
        out.push_str(&format!(",best_{i},mean_{i}"));
    }
    out.push_str(",front0_size,reject_frac,checksum\n");
    for r in &history.records {
        out.push_str(&r.generation.to_string());
        for i in 0..m {
            out.push_str(&format!(",{},{}", r.best[i], r.mean[i]));
        }
        out.push_str(&format!(
            ",{},{},{}\n",
            r.front0_size, r.reject_frac, r.checksum
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vecs(raw: &[&[f64]]) -> Vec<ObjectiveVector> {
        raw.iter().map(|v| ObjectiveVector(v.to_vec())).collect()
    }

    #[test]
    fn dominates_cases() {
        let v = vecs(&[&[1.0, 1.0], &[0.0, 0.0], &[2.0, 2.0], &[1.0, 3.0]]);
        assert!(dominates(&v[0], &v[1]).unwrap());
        assert!(!dominates(&v[2], &v[3]).unwrap());
        assert!(!dominates(&v[0], &v[0]).unwrap());
        let short = ObjectiveVector(vec![1.0]);
        assert!(dominates(&v[0], &short).is_err());
    }

    #[test]
    fn sort_example() {
        let v = vecs(&[&[1.0, 1.0], &[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]]);
        let fronts = non_dominated_sort(&v);
        assert_eq!(fronts, vec![vec![0], vec![2, 3], vec![1]]);
    }

    #[test]
    fn sort_identical_vectors_single_front() {
        let v = vecs(&[&[1.0, 2.0], &[1.0, 2.0], &[1.0, 2.0]]);
        assert_eq!(non_dominated_sort(&v), vec![vec![0, 1, 2]]);
    }

    #[test]
    fn sort_singleton() {
        let v = vecs(&[&[3.0]]);
        assert_eq!(non_dominated_sort(&v), vec![vec![0]]);
    }

    #[test]
    fn crowding_small_fronts_are_infinite() {
        let v = vecs(&[&[1.0, 0.0], &[0.0, 1.0]]);
        assert!(crowding_distance(&v).iter().all(|d| d.is_infinite()));
    }

    #[test]
    fn crowding_colinear_interior() {
        let v = vecs(&[&[0.0], &[5.0], &[10.0]]);
        let d = crowding_distance(&v);
        assert!(d[0].is_infinite() && d[2].is_infinite());
        assert!((d[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn crowding_identical_points_zero_interior() {
        let v = vecs(&[&[1.0, 1.0], &[1.0, 1.0], &[1.0, 1.0]]);
        let d = crowding_distance(&v);
        assert_eq!(d[1], 0.0);
    }

    fn dummy_individual(rank: usize, crowding: f64) -> Individual {
        Individual {
            genome: Dna::new("ATG").unwrap(),
            protein: Protein::new("M").unwrap(),
            objectives: ObjectiveVector(vec![0.0]),
            verdict: FilterVerdict::accept(),
            rank,
            crowding,
            lineage_id: 0,
        }
    }

    #[test]
    fn tournament_rules() {
        let mut rng = derive_rng_stream(1, 0, 0);
        let solo = vec![dummy_individual(3, 0.0)];
        assert_eq!(tournament_select(&solo, 2, &mut rng).rank, 3);

        // k=64 draws from a 2-candidate pool see both candidates with
        // probability 1 - 2^-63, so the comparison rule decides
        let by_rank = vec![dummy_individual(1, f64::INFINITY), dummy_individual(0, 0.0)];
        for _ in 0..20 {
            assert_eq!(tournament_select(&by_rank, 64, &mut rng).rank, 0);
        }
        let by_crowding = vec![dummy_individual(0, 1.0), dummy_individual(0, f64::INFINITY)];
        for _ in 0..20 {
            assert!(tournament_select(&by_crowding, 64, &mut rng)
                .crowding
                .is_infinite());
        }
    }

    fn desk_config() -> RunConfig {
        RunConfig {
            mode: RunMode::UnknownToKnown,
            seed: 1,
            population_size: 20,
            generations: 5,
            initial_length: Some(30),
            source_gene: None,
            rates: MutationRates::default(),
            objectives: vec![ObjectiveSpec::ChargedFraction],
            filter: FilterConfig {
                min_length: 1,
                min_entropy: 0.0,
                reject_truncated: false,
                ..FilterConfig::default()
            },
            pka: PkaSet::default(),
            tournament_size: 2,
            worst_objective: -1e9,
            output_dir: None,
        }
    }

    #[test]
    fn zero_generations_single_record() {
        let mut cfg = desk_config();
        cfg.generations = 0;
        let out = Engine::new(cfg).unwrap().run().unwrap();
        assert_eq!(out.history.records.len(), 1);
        assert_eq!(out.population.len(), 20);
    }

    #[test]
    fn population_size_preserved() {
        let out = Engine::new(desk_config()).unwrap().run().unwrap();
        assert_eq!(out.population.len(), 20);
        assert_eq!(out.history.records.len(), 6);
        for ind in &out.population {
            assert_ne!(ind.rank, usize::MAX);
            assert_eq!(ind.protein, translate(&ind.genome, 0));
        }
    }

    #[test]
    fn run_deterministic() {
        let engine = Engine::new(desk_config()).unwrap();
        let a = engine.run().unwrap();
        let b = engine.run().unwrap();
        assert_eq!(history_csv(&a.history), history_csv(&b.history));
        for (x, y) in a.population.iter().zip(&b.population) {
            assert_eq!(x.genome, y.genome);
        }
    }

    #[test]
    fn no_variation_fixed_point() {
        let mut cfg = desk_config();
        cfg.rates = MutationRates {
            point_rate: 0.0,
            insertion_rate: 0.0,
            deletion_rate: 0.0,
            crossover_prob: 0.0,
            ..MutationRates::default()
        };
        cfg.generations = 10;
        let engine = Engine::new(cfg).unwrap();
        let mut initial: Vec<String> = engine
            .initial_genomes()
            .unwrap()
            .into_iter()
            .map(|(g, _)| g.bases().to_string())
            .collect();
        initial.sort();
        let out = engine.run().unwrap();
        assert_eq!(out.history.records.len(), 11);
        let mut final_sorted: Vec<String> = out
            .population
            .iter()
            .map(|i| i.genome.bases().to_string())
            .collect();
        final_sorted.sort();
        assert_eq!(initial, final_sorted);
    }

    #[test]
    fn pareto_regression_never_happens() {
        let mut cfg = desk_config();
        cfg.objectives = vec![
            ObjectiveSpec::ChargedFraction,
            ObjectiveSpec::SaltBridge { window: 4 },
        ];
        cfg.generations = 15;
        let engine = Engine::new(cfg).unwrap();
        let mut pop = engine.evaluate_genomes(engine.initial_genomes().unwrap());
        engine.assign_ranks(&mut pop);
        for gen in 1..=15 {
            let prev_front: Vec<ObjectiveVector> = pop
                .iter()
                .filter(|i| i.rank == 0)
                .map(|i| i.objectives.clone())
                .collect();
            pop = engine.step_generation(pop, gen);
            for ind in pop.iter().filter(|i| i.rank == 0) {
                for old in &prev_front {
                    assert!(
                        !dominates(old, &ind.objectives).unwrap(),
                        "front regressed at generation {gen}"
                    );
                }
            }
        }
    }

    #[test]
    fn config_validation_names_field() {
        let mut cfg = desk_config();
        cfg.population_size = 3;
        match Engine::new(cfg).unwrap_err() {
            MolevoError::Config { field, .. } => assert_eq!(field, "population_size"),
            other => panic!("unexpected {other:?}"),
        }
        let mut cfg = desk_config();
        cfg.initial_length = None;
        match Engine::new(cfg).unwrap_err() {
            MolevoError::Config { field, .. } => assert_eq!(field, "initial_length"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn k2u_initial_population_is_diverse() {
        let mut cfg = desk_config();
        cfg.mode = RunMode::KnownToUnknown;
        cfg.initial_length = None;
        cfg.rates.point_rate = 0.05;
        cfg.source_gene = Some("ATGGCTAAAGCTGCTAAAGCTGCTAAAGCTGCTAAAGCTGCTAAA".into());
        cfg.generations = 0;
        let out = Engine::new(cfg).unwrap().run().unwrap();
        let distinct: std::collections::HashSet<&str> = out
            .population
            .iter()
            .map(|i| i.genome.bases())
            .collect();
        assert!(distinct.len() > 1, "forced variation pass had no effect");
    }

    #[test]
    fn history_csv_shape() {
        let out = Engine::new(desk_config()).unwrap().run().unwrap();
        let csv = history_csv(&out.history);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "generation,best_0,mean_0,front0_size,reject_frac,checksum");
        assert_eq!(lines.len(), 7);
        assert!(lines[1].starts_with("0,"));
    }
}
