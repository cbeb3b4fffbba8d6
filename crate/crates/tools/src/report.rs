//! Serializable reports. Complexes are coefficient arrays and exact
//! rationals are strings like `"3/2"`.

use crn_core::dynamics::{EquivalenceReport, Realization};
use crn_core::geometry::{
    candidate_directions, endotactic_sampled, parallel_sweep_sampled, sources_contain_all_vertices,
    strongly_endotactic_exact, GeometryError, SweepVerdict,
};
use crn_core::network::text::format_rational;
use crn_core::network::{
    is_bimolecular_autocatalytic, is_reversible, is_strongly_connected, is_weakly_reversible, linkage_classes,
    production_graph, property_x_check, stoichiometric_subspace,
};
use crn_core::simulate::{Outcome, PermanenceReport, PermanenceVerdict, Trajectory};
use crn_core::{BigRational, MassActionSystem, PolynomialField, ReactionNetwork};
use serde::{Deserialize, Serialize};

use crate::io::NetworkJson;

fn rationals(v: &[BigRational]) -> Vec<String> {
    v.iter().map(format_rational).collect()
}

/// A yes/no answer with its certificate, or `value: null` and the reason it
/// was not decided.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict<C> {
    pub value: Option<bool>,
    #[serde(default = "Option::default", skip_serializing_if = "Option::is_none")]
    pub certificate: Option<C>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl<C> Verdict<C> {
    fn decided(value: bool, certificate: Option<C>) -> Self {
        Verdict { value: Some(value), certificate, reason: None }
    }

    fn undecided(reason: impl Into<String>) -> Self {
        Verdict { value: None, certificate: None, reason: Some(reason.into()) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub network: NetworkSummary,
    pub flags: Flags,
    pub geometry: GeometryReport,
    pub production_graph: ProductionGraphReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkSummary {
    pub species: Vec<String>,
    pub reactions: usize,
    pub complexes: usize,
    /// Each class as formatted complexes.
    pub linkage_classes: Vec<Vec<String>>,
    pub stoichiometric_dimension: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Flags {
    pub reversible: bool,
    pub weakly_reversible: bool,
    pub bimolecular_autocatalytic: bool,
    pub property_x: Verdict<PropertyXCertificate>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyXCertificate {
    /// First pair of species without a suitable production.
    pub failing_pair: Option<[String; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometryReport {
    pub sources_contain_all_vertices: bool,
    pub strongly_endotactic: Verdict<FaceCertificate>,
    /// Sampled, sound only when it refutes.
    pub parallel_sweep: SweepReport,
    /// Sampled, sound only when it refutes.
    pub endotactic_sweep: SweepReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaceCertificate {
    pub faces_checked: usize,
    /// Present when the answer is no: a face of the source hull that no
    /// reaction leaves.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness_face: Option<FaceJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaceJson {
    pub vertices: Vec<Vec<u32>>,
    /// Points into the hull: `normal . p >= offset` with equality on the face.
    pub normal: Vec<String>,
    pub offset: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    /// `refuted`, `no_violation_found` or `not_run`.
    pub verdict: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reaction: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub directions_tested: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl SweepReport {
    fn new(net: &ReactionNetwork, result: Result<SweepVerdict, GeometryError>) -> Self {
        let blank = SweepReport {
            verdict: String::new(),
            direction: None,
            reaction: None,
            directions_tested: None,
            reason: None,
        };
        match result {
            Ok(SweepVerdict::Refuted { direction, reaction }) => SweepReport {
                verdict: "refuted".into(),
                direction: Some(rationals(&direction)),
                reaction: reaction.map(|k| net.format_reaction(&net.reactions()[k])),
                ..blank
            },
            Ok(SweepVerdict::NoViolationFound { directions_tested }) => SweepReport {
                verdict: "no_violation_found".into(),
                directions_tested: Some(directions_tested),
                ..blank
            },
            Err(e) => SweepReport { verdict: "not_run".into(), reason: Some(e.to_string()), ..blank },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductionGraphReport {
    pub edges: Vec<[String; 2]>,
    pub strongly_connected: bool,
}

/// Runs every structural and geometric check. `extra_directions` random
/// directions (seeded) join the deterministic sweep candidates.
pub fn analyze(net: &ReactionNetwork, extra_directions: usize, seed: u64) -> AnalysisReport {
    let names = net.species_names();
    let complexes = net.complexes();
    let bimolecular = is_bimolecular_autocatalytic(net);

    let property_x = if bimolecular {
        match property_x_check(net) {
            Ok(px) => Verdict::decided(
                px.holds,
                Some(PropertyXCertificate {
                    failing_pair: px.failing_pair.map(|(i, j)| [names[i].clone(), names[j].clone()]),
                }),
            ),
            Err(e) => Verdict::undecided(e.to_string()),
        }
    } else {
        Verdict::undecided("not bimolecular autocatalytic")
    };

    let contained = sources_contain_all_vertices(net);
    let strongly_endotactic = match strongly_endotactic_exact(net) {
        Ok(d) => {
            let sources = net.sources();
            let witness_face = d.witness.map(|f| FaceJson {
                vertices: f.vertex_indices.iter().map(|&i| sources[i].coeffs().to_vec()).collect(),
                normal: rationals(&f.normal),
                offset: format_rational(&f.offset),
            });
            Verdict::decided(
                d.strongly_endotactic,
                Some(FaceCertificate { faces_checked: d.faces_checked, witness_face }),
            )
        }
        Err(GeometryError::ContainmentFails) => Verdict::undecided(
            "some complex lies outside the convex hull of the sources; only the sampled sweep applies",
        ),
        Err(e) => Verdict::undecided(e.to_string()),
    };
    let directions = candidate_directions(net, extra_directions, seed);
    let geometry = GeometryReport {
        sources_contain_all_vertices: contained,
        strongly_endotactic,
        parallel_sweep: SweepReport::new(net, parallel_sweep_sampled(net, &directions)),
        endotactic_sweep: SweepReport::new(net, endotactic_sampled(net, &directions)),
    };

    let g = production_graph(net);
    AnalysisReport {
        network: NetworkSummary {
            species: names.clone(),
            reactions: net.len(),
            complexes: complexes.len(),
            linkage_classes: linkage_classes(net)
                .iter()
                .map(|class| class.iter().map(|&i| net.format_complex(&complexes[i])).collect())
                .collect(),
            stoichiometric_dimension: stoichiometric_subspace(net).len(),
        },
        flags: Flags {
            reversible: is_reversible(net),
            weakly_reversible: is_weakly_reversible(net),
            bimolecular_autocatalytic: bimolecular,
            property_x,
        },
        geometry,
        production_graph: ProductionGraphReport {
            edges: g.edges.iter().map(|&(i, j)| [names[i].clone(), names[j].clone()]).collect(),
            strongly_connected: is_strongly_connected(&g),
        },
    }
}

fn yes_no(v: Option<bool>) -> &'static str {
    match v {
        Some(true) => "yes",
        Some(false) => "no",
        None => "not decided",
    }
}

impl AnalysisReport {
    pub fn to_text(&self) -> String {
        let n = &self.network;
        let f = &self.flags;
        let g = &self.geometry;
        let mut out = format!(
            "species: {}\nreactions: {}\ncomplexes: {}\nlinkage classes: {}\nstoichiometric dimension: {}\n",
            n.species.join(" "),
            n.reactions,
            n.complexes,
            n.linkage_classes.len(),
            n.stoichiometric_dimension
        );
        out += &format!("reversible: {}\n", yes_no(Some(f.reversible)));
        out += &format!("weakly reversible: {}\n", yes_no(Some(f.weakly_reversible)));
        out += &format!("bimolecular autocatalytic: {}\n", yes_no(Some(f.bimolecular_autocatalytic)));
        out += &format!("property X: {}", yes_no(f.property_x.value));
        if let Some([a, b]) = f.property_x.certificate.as_ref().and_then(|c| c.failing_pair.clone()) {
            out += &format!(" (fails for {a}, {b})");
        }
        if let Some(r) = &f.property_x.reason {
            out += &format!(" ({r})");
        }
        out += "\n";
        out += &format!("sources contain all vertices: {}\n", yes_no(Some(g.sources_contain_all_vertices)));
        out += &format!("strongly endotactic (exact): {}", yes_no(g.strongly_endotactic.value));
        if let Some(face) = g.strongly_endotactic.certificate.as_ref().and_then(|c| c.witness_face.as_ref()) {
            out += &format!(" (witness face {:?}, normal [{}])", face.vertices, face.normal.join(", "));
        }
        if let Some(r) = &g.strongly_endotactic.reason {
            out += &format!(" ({r})");
        }
        out += "\n";
        for (name, s) in [("parallel sweep", &g.parallel_sweep), ("endotactic sweep", &g.endotactic_sweep)] {
            out += &format!("{name} (sampled): {}", s.verdict.replace('_', " "));
            if let Some(w) = &s.direction {
                out += &format!(" along w = [{}]", w.join(", "));
            }
            if let Some(r) = &s.reaction {
                out += &format!(" by {r}");
            }
            if let Some(k) = s.directions_tested {
                out += &format!(" over {k} directions");
            }
            out += "\n";
        }
        out += &format!(
            "production graph: {} edges, strongly connected: {}\n",
            self.production_graph.edges.len(),
            yes_no(Some(self.production_graph.strongly_connected))
        );
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceJson {
    pub equivalent: bool,
    pub fields_equal: bool,
    pub failing: Vec<ResidualJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualJson {
    pub source: Vec<u32>,
    pub residual: Vec<String>,
}

impl From<&EquivalenceReport> for EquivalenceJson {
    fn from(r: &EquivalenceReport) -> Self {
        EquivalenceJson {
            equivalent: r.equivalent,
            fields_equal: r.fields_equal,
            failing: r
                .failing
                .iter()
                .map(|v| ResidualJson { source: v.source.coeffs().to_vec(), residual: rationals(&v.residual) })
                .collect(),
        }
    }
}

/// Everything needed to re-check a realization independently.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealizationCertificate {
    pub input: NetworkJson,
    pub realized: NetworkJson,
    pub splits: Vec<SplitJson>,
    pub nodes_explored: usize,
    pub weakly_reversible: bool,
    pub linkage_classes: usize,
    pub equivalent: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitJson {
    pub source: Vec<u32>,
    pub target: Vec<u32>,
    pub rate: String,
    pub targets: [Vec<u32>; 2],
    pub rates: [String; 2],
}

impl RealizationCertificate {
    pub fn new(input: &MassActionSystem, real: &Realization) -> anyhow::Result<Self> {
        let out = real.system.network();
        Ok(RealizationCertificate {
            input: NetworkJson::from_system(input)?,
            realized: NetworkJson::from_system(&real.system)?,
            splits: real
                .splits
                .iter()
                .map(|s| SplitJson {
                    source: s.source.coeffs().to_vec(),
                    target: s.target.coeffs().to_vec(),
                    rate: format_rational(&s.rate),
                    targets: [s.targets[0].coeffs().to_vec(), s.targets[1].coeffs().to_vec()],
                    rates: [format_rational(&s.rates[0]), format_rational(&s.rates[1])],
                })
                .collect(),
            nodes_explored: real.nodes_explored,
            weakly_reversible: is_weakly_reversible(out),
            linkage_classes: linkage_classes(out).len(),
            equivalent: crn_core::dynamics::dynamically_equivalent(input, &real.system)?.equivalent,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OutcomeJson {
    Completed,
    BlowUp { t: f64 },
    BoundaryApproach { species: usize, t: f64 },
}

impl From<Outcome> for OutcomeJson {
    fn from(o: Outcome) -> Self {
        match o {
            Outcome::Completed => OutcomeJson::Completed,
            Outcome::BlowUp { t } => OutcomeJson::BlowUp { t },
            Outcome::BoundaryApproach { species, t } => OutcomeJson::BoundaryApproach { species, t },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunJson {
    pub initial: Vec<f64>,
    pub outcome: OutcomeJson,
    pub steps: usize,
    pub rejected: usize,
    pub final_time: f64,
    pub final_state: Vec<f64>,
}

impl RunJson {
    pub fn new(traj: &Trajectory) -> Self {
        let (t, x) = traj.last();
        RunJson {
            initial: traj.states[0].clone(),
            outcome: traj.outcome.into(),
            steps: traj.steps(),
            rejected: traj.rejected,
            final_time: t,
            final_state: x.to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub species: Vec<String>,
    pub seed: u64,
    /// Bound of the variable rate profile, when one was used.
    pub variable_k: Option<f64>,
    pub runs: Vec<RunJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub permanence: Option<PermanenceJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PermanenceJson {
    pub runs: Vec<ProbeRunJson>,
    pub delta_hat: f64,
    pub delta_floor: f64,
    pub verdict: PermanenceVerdictJson,
    pub caveat: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeRunJson {
    pub profile: usize,
    pub initial: Vec<f64>,
    pub outcome: OutcomeJson,
    pub trailing_min: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PermanenceVerdictJson {
    ConsistentWithPermanence,
    PersistenceFailureObserved { run: usize, species: usize },
}

impl PermanenceJson {
    pub fn new(r: &PermanenceReport, delta_floor: f64) -> Self {
        PermanenceJson {
            runs: r
                .runs
                .iter()
                .map(|run| ProbeRunJson {
                    profile: run.profile,
                    initial: run.initial.clone(),
                    outcome: run.outcome.into(),
                    trailing_min: run.trailing_min.clone(),
                })
                .collect(),
            delta_hat: r.delta_hat,
            delta_floor,
            verdict: match r.verdict {
                PermanenceVerdict::ConsistentWithPermanence => PermanenceVerdictJson::ConsistentWithPermanence,
                PermanenceVerdict::PersistenceFailureObserved { run, species } => {
                    PermanenceVerdictJson::PersistenceFailureObserved { run, species }
                }
            },
            caveat: r.caveat.to_string(),
        }
    }
}

/// Full trajectories, for `--out` files ending in `.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryJson {
    pub species: Vec<String>,
    pub runs: Vec<TrajectoryRunJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRunJson {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub outcome: OutcomeJson,
}

impl TrajectoryJson {
    pub fn new(species: Vec<String>, runs: &[Trajectory]) -> Self {
        TrajectoryJson {
            species,
            runs: runs
                .iter()
                .map(|t| TrajectoryRunJson { times: t.times.clone(), states: t.states.clone(), outcome: t.outcome.into() })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldJson {
    pub species: Vec<String>,
    /// One monomial list per species.
    pub components: Vec<Vec<MonomialJson>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonomialJson {
    pub coeff: String,
    pub exponent: Vec<u32>,
}

impl FieldJson {
    pub fn new(species: Vec<String>, f: &PolynomialField) -> Self {
        FieldJson {
            species,
            components: f
                .components()
                .iter()
                .map(|p| {
                    p.monomials()
                        .into_iter()
                        .map(|m| MonomialJson { coeff: format_rational(&m.coeff), exponent: m.exponent.0 })
                        .collect()
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crn_core::families::{Family, FamilySpec};

    #[test]
    fn analysis_of_table_one_relative() {
        let sys = FamilySpec::new(Family::RepRecomb, 3).relative().system().unwrap();
        let r = analyze(sys.network(), 16, 0);
        assert_eq!(r.geometry.strongly_endotactic.value, Some(true));
        assert_eq!(r.geometry.parallel_sweep.verdict, "no_violation_found");
        assert!(!r.flags.weakly_reversible);
        assert!(r.to_text().contains("strongly endotactic (exact): yes"));
    }

    #[test]
    fn undecided_verdicts_carry_reasons() {
        let sys = MassActionSystem::parse("X1 -> 2X1").unwrap();
        let r = analyze(sys.network(), 0, 0);
        assert_eq!(r.geometry.strongly_endotactic.value, None);
        assert!(r.geometry.strongly_endotactic.reason.is_some());
        assert_eq!(r.flags.property_x.value, None);
        assert_eq!(r.geometry.endotactic_sweep.verdict, "refuted");
        assert_eq!(r.geometry.endotactic_sweep.direction, Some(vec!["-1".to_string()]));
    }

    #[test]
    fn outcome_tags() {
        let j = serde_json::to_value(OutcomeJson::from(Outcome::BlowUp { t: 1.0 })).unwrap();
        assert_eq!(j, serde_json::json!({"kind": "blow_up", "t": 1.0}));
    }
}
