//! Agent checkpoints: a line-oriented text dump of the population, the
//! code-path store, and the policy store, written between trials and
//! restorable for inspection or resumption.
//!
//! Layout (version header first):
//!
//! ```text
//! hetroxcs-checkpoint v1
//! [params]          key=value lines, one per learning parameter
//! [lateral]         policy_limit / evolve_attempts / suffix_depth
//! [state]           trials / clock / policy_seq / mismatches counters
//! [versions]        <sensation>=<max minted version>
//! [goals]           goal-marked state versions, one per line
//! [population]      condition action prediction error fitness
//!                   numerosity experience set_size timestamp
//! [codepaths]       <root>: <action>><dest>@<lru> ...
//! [policies]        <malign> <uses> <successes> <created>:
//!                   <root>:<action> ... > <terminal>
//! ```

use std::str::FromStr;

use maze_env::{Action, Sensation};
use thiserror::Error;
use xcs_core::{Classifier, Population, XcsParams};

use crate::agent::{HetroAgent, LateralParams};
use crate::policy::{Policy, PolicyStep};
use crate::state::{CodePath, StateVersion};

const HEADER: &str = "hetroxcs-checkpoint v1";

#[derive(Debug, Error)]
pub enum CheckpointError {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("unsupported checkpoint header {0:?}")]
    BadHeader(String),
    #[error("config: {0}")]
    Config(#[from] xcs_core::ConfigError),
}

fn err(line: usize, reason: impl Into<String>) -> CheckpointError {
    CheckpointError::Parse {
        line,
        reason: reason.into(),
    }
}

fn fmt_sv(sv: StateVersion) -> String {
    format!("{}/{}", sv.sensation, sv.version)
}

fn parse_sv(text: &str, line: usize) -> Result<StateVersion, CheckpointError> {
    let (sens, ver) = text
        .split_once('/')
        .ok_or_else(|| err(line, format!("bad state version {text:?}")))?;
    let sensation =
        Sensation::from_str(sens).map_err(|e| err(line, format!("bad sensation: {e}")))?;
    let version: u16 = ver
        .parse()
        .map_err(|_| err(line, format!("bad version {ver:?}")))?;
    Ok(StateVersion::new(sensation, version))
}

impl HetroAgent {
    pub fn write_checkpoint(&self) -> String {
        let mut out = String::new();
        out.push_str(HEADER);
        out.push('\n');

        out.push_str("[params]\n");
        out.push_str(&self.params.to_string());

        out.push_str("[lateral]\n");
        out.push_str(&format!("policy_limit={}\n", self.lateral.policy_limit));
        out.push_str(&format!("evolve_attempts={}\n", self.lateral.evolve_attempts));
        out.push_str(&format!("suffix_depth={}\n", self.lateral.suffix_depth));

        out.push_str("[state]\n");
        out.push_str(&format!("trials={}\n", self.trials));
        out.push_str(&format!("clock={}\n", self.clock));
        out.push_str(&format!("policy_seq={}\n", self.policy_seq));
        out.push_str(&format!("mismatches={}\n", self.mismatches));

        out.push_str("[versions]\n");
        for (sensation, max) in &self.version_counts {
            out.push_str(&format!("{sensation}={max}\n"));
        }

        out.push_str("[goals]\n");
        for sv in &self.goal_versions {
            out.push_str(&fmt_sv(*sv));
            out.push('\n');
        }

        out.push_str("[population]\n");
        for (_, cl) in self.population.iter() {
            out.push_str(&format!(
                "{} {} {:?} {:?} {:?} {} {} {:?} {}\n",
                cl.condition,
                cl.action,
                cl.prediction,
                cl.error,
                cl.fitness,
                cl.numerosity,
                cl.experience,
                cl.action_set_size,
                cl.ga_timestamp,
            ));
        }

        out.push_str("[codepaths]\n");
        for cp in self.cp_store.values() {
            out.push_str(&fmt_sv(cp.root));
            out.push(':');
            for b in cp.branches() {
                out.push_str(&format!(" {}>{}@{}", b.action, fmt_sv(b.dest), b.last_used));
            }
            out.push('\n');
        }

        out.push_str("[policies]\n");
        for p in &self.policies {
            out.push_str(&format!(
                "{} {} {} {}:",
                u8::from(p.malign),
                p.uses,
                p.successes,
                p.created
            ));
            for step in &p.steps {
                out.push_str(&format!(" {}:{}", fmt_sv(step.root), step.action));
            }
            out.push_str(&format!(" > {}\n", fmt_sv(p.terminal)));
        }
        out
    }

    pub fn read_checkpoint(text: &str) -> Result<HetroAgent, CheckpointError> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or_else(|| CheckpointError::BadHeader(String::new()))?;
        if header != HEADER {
            return Err(CheckpointError::BadHeader(header.to_string()));
        }

        let mut section = String::new();
        let mut params_text = String::new();
        let mut agent = HetroAgent::new(XcsParams::default(), LateralParams::default());
        let mut classifiers: Vec<Classifier> = Vec::new();

        for (idx, raw) in lines {
            let line_no = idx + 1;
            let line = raw.trim_end();
            if line.is_empty() {
                continue;
            }
            if line.starts_with('[') && line.ends_with(']') {
                section = line[1..line.len() - 1].to_string();
                continue;
            }
            match section.as_str() {
                "params" => {
                    params_text.push_str(line);
                    params_text.push('\n');
                }
                "lateral" => {
                    let (key, value) = line
                        .split_once('=')
                        .ok_or_else(|| err(line_no, "expected key=value"))?;
                    let v: usize = value
                        .parse()
                        .map_err(|_| err(line_no, format!("bad value {value:?}")))?;
                    match key {
                        "policy_limit" => agent.lateral.policy_limit = v,
                        "evolve_attempts" => agent.lateral.evolve_attempts = v,
                        "suffix_depth" => agent.lateral.suffix_depth = v,
                        _ => return Err(err(line_no, format!("unknown lateral key {key:?}"))),
                    }
                }
                "state" => {
                    let (key, value) = line
                        .split_once('=')
                        .ok_or_else(|| err(line_no, "expected key=value"))?;
                    let v: u64 = value
                        .parse()
                        .map_err(|_| err(line_no, format!("bad value {value:?}")))?;
                    match key {
                        "trials" => agent.trials = v,
                        "clock" => agent.clock = v,
                        "policy_seq" => agent.policy_seq = v,
                        "mismatches" => agent.mismatches = v,
                        _ => return Err(err(line_no, format!("unknown state key {key:?}"))),
                    }
                }
                "versions" => {
                    let (sens, max) = line
                        .split_once('=')
                        .ok_or_else(|| err(line_no, "expected sensation=max"))?;
                    let sensation = Sensation::from_str(sens)
                        .map_err(|e| err(line_no, format!("bad sensation: {e}")))?;
                    let max: u16 = max
                        .parse()
                        .map_err(|_| err(line_no, format!("bad count {max:?}")))?;
                    agent.version_counts.insert(sensation, max);
                }
                "goals" => {
                    let sv = parse_sv(line, line_no)?;
                    agent.goal_versions.insert(sv);
                }
                "population" => {
                    let fields: Vec<&str> = line.split_whitespace().collect();
                    if fields.len() != 9 {
                        return Err(err(line_no, "expected 9 classifier fields"));
                    }
                    let parse_f = |t: &str| {
                        t.parse::<f64>()
                            .map_err(|_| err(line_no, format!("bad float {t:?}")))
                    };
                    classifiers.push(Classifier {
                        condition: fields[0]
                            .parse()
                            .map_err(|e| err(line_no, format!("bad condition: {e}")))?,
                        action: Action::new(
                            fields[1]
                                .parse::<u8>()
                                .map_err(|_| err(line_no, "bad action"))?,
                        ),
                        prediction: parse_f(fields[2])?,
                        error: parse_f(fields[3])?,
                        fitness: parse_f(fields[4])?,
                        numerosity: fields[5]
                            .parse()
                            .map_err(|_| err(line_no, "bad numerosity"))?,
                        experience: fields[6]
                            .parse()
                            .map_err(|_| err(line_no, "bad experience"))?,
                        action_set_size: parse_f(fields[7])?,
                        ga_timestamp: fields[8]
                            .parse()
                            .map_err(|_| err(line_no, "bad timestamp"))?,
                    });
                }
                "codepaths" => {
                    let (root, rest) = line
                        .split_once(':')
                        .ok_or_else(|| err(line_no, "expected root: branches"))?;
                    let root = parse_sv(root, line_no)?;
                    let mut cp = CodePath::new(root);
                    for branch in rest.split_whitespace() {
                        let (action, rest) = branch
                            .split_once('>')
                            .ok_or_else(|| err(line_no, format!("bad branch {branch:?}")))?;
                        let (dest, lru) = rest
                            .split_once('@')
                            .ok_or_else(|| err(line_no, format!("bad branch {branch:?}")))?;
                        let action = Action::new(
                            action.parse::<u8>().map_err(|_| err(line_no, "bad action"))?,
                        );
                        let dest = parse_sv(dest, line_no)?;
                        let lru: u64 =
                            lru.parse().map_err(|_| err(line_no, "bad lru stamp"))?;
                        cp.record(action, dest, lru);
                    }
                    agent.cp_store.insert(root, cp);
                }
                "policies" => {
                    let (meta, chain) = line
                        .split_once(':')
                        .ok_or_else(|| err(line_no, "expected meta: chain"))?;
                    let meta: Vec<&str> = meta.split_whitespace().collect();
                    if meta.len() != 4 {
                        return Err(err(line_no, "expected 4 policy fields"));
                    }
                    let (chain, terminal) = chain
                        .rsplit_once('>')
                        .ok_or_else(|| err(line_no, "missing terminal"))?;
                    let mut steps = Vec::new();
                    for item in chain.split_whitespace() {
                        let (sv, action) = item
                            .rsplit_once(':')
                            .ok_or_else(|| err(line_no, format!("bad step {item:?}")))?;
                        steps.push(PolicyStep {
                            root: parse_sv(sv, line_no)?,
                            action: Action::new(
                                action.parse::<u8>().map_err(|_| err(line_no, "bad action"))?,
                            ),
                        });
                    }
                    if steps.is_empty() {
                        return Err(err(line_no, "policy with no steps"));
                    }
                    let mut policy = Policy::new(
                        steps,
                        parse_sv(terminal.trim(), line_no)?,
                        meta[3].parse().map_err(|_| err(line_no, "bad created"))?,
                    );
                    policy.malign = meta[0] == "1";
                    policy.uses = meta[1].parse().map_err(|_| err(line_no, "bad uses"))?;
                    policy.successes =
                        meta[2].parse().map_err(|_| err(line_no, "bad successes"))?;
                    agent.policies.push(policy);
                }
                other => return Err(err(line_no, format!("unknown section {other:?}"))),
            }
        }

        agent.params = XcsParams::from_kv(&params_text)?;
        agent.population = Population::restore(classifiers);
        Ok(agent)
    }
}
