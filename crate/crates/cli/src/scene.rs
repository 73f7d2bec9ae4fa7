//! Scene documents: parsing, name resolution and object construction.

use std::fmt;
use std::sync::Arc;

use entsym::coding::ClassicalChannel;
use entsym::cpmaps::{compose, ChannelMap};
use entsym::frobenius::commutative_algebra;
use entsym::groups::{
    check_cocycle, clock_shift_rep, twisted_group_algebra, weyl_cocycle, Cocycle2, CocycleReport,
    FiniteAbelianGroup, GradedAlgebra, ProjectiveRep, Subgroup,
};
use entsym::sample::{covariant_channel_from, random_covariant_channel};
use entsym::{matrix_algebra, multimatrix_algebra, tensor_product, DenseMatrix, FrobeniusAlgebra, C64};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

/// A complex entry, either `[re, im]` or a bare real number.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Pair([f64; 2]),
    Real(f64),
}

impl Entry {
    fn value(self) -> C64 {
        match self {
            Entry::Pair([re, im]) => C64::new(re, im),
            Entry::Real(re) => C64::new(re, 0.0),
        }
    }
}

pub type MatrixSpec = Vec<Vec<Entry>>;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneFile {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub groups: Vec<GroupDecl>,
    #[serde(default)]
    pub cocycles: Vec<CocycleDecl>,
    #[serde(default)]
    pub representations: Vec<RepDecl>,
    #[serde(default)]
    pub algebras: Vec<AlgebraDecl>,
    #[serde(default)]
    pub channels: Vec<ChannelDecl>,
    #[serde(default)]
    pub tasks: Vec<TaskDecl>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupDecl {
    pub name: String,
    pub orders: Vec<usize>,
}

/// Exactly one of `generator` and `table`. The generator is `"weyl:d"` or `"trivial"`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CocycleDecl {
    pub name: String,
    #[serde(default)]
    pub group: Option<String>,
    #[serde(default)]
    pub generator: Option<String>,
    #[serde(default)]
    pub table: Option<MatrixSpec>,
}

/// Exactly one of `generator` (`"clock_shift:d"`) and `matrices`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepDecl {
    pub name: String,
    #[serde(default)]
    pub cocycle: Option<String>,
    #[serde(default)]
    pub generator: Option<String>,
    #[serde(default)]
    pub matrices: Option<Vec<MatrixSpec>>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AlgebraDecl {
    Matrix {
        name: String,
        d: usize,
    },
    Multimatrix {
        name: String,
        blocks: Vec<usize>,
    },
    Commutative {
        name: String,
        dim: usize,
    },
    GroupAlgebra {
        name: String,
        group: String,
        /// Generators of the subgroup as element tuples; the whole group if absent.
        #[serde(default)]
        subgroup: Option<Vec<Vec<usize>>>,
        #[serde(default)]
        cocycle: Option<String>,
        #[serde(default)]
        representation: Option<String>,
    },
    Tensor {
        name: String,
        factors: [String; 2],
    },
}

impl AlgebraDecl {
    fn name(&self) -> &str {
        match self {
            AlgebraDecl::Matrix { name, .. }
            | AlgebraDecl::Multimatrix { name, .. }
            | AlgebraDecl::Commutative { name, .. }
            | AlgebraDecl::GroupAlgebra { name, .. }
            | AlgebraDecl::Tensor { name, .. } => name,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ChannelDecl {
    Matrix {
        name: String,
        source: String,
        target: String,
        matrix: MatrixSpec,
    },
    Identity {
        name: String,
        algebra: String,
    },
    CompletelyMixing {
        name: String,
        source: String,
        target: String,
    },
    /// Factor-basis matrix `F[a,b] = p(χ_a conj χ_b)`.
    Covariant {
        name: String,
        algebra: String,
        distribution: Vec<f64>,
    },
    RandomCovariant {
        name: String,
        algebra: String,
    },
    Compose {
        name: String,
        outer: String,
        inner: String,
    },
    /// Rows indexed by output: `matrix[y][x] = p(y|x)`.
    Classical {
        name: String,
        matrix: Vec<Vec<f64>>,
    },
}

impl ChannelDecl {
    fn name(&self) -> &str {
        match self {
            ChannelDecl::Matrix { name, .. }
            | ChannelDecl::Identity { name, .. }
            | ChannelDecl::CompletelyMixing { name, .. }
            | ChannelDecl::Covariant { name, .. }
            | ChannelDecl::RandomCovariant { name, .. }
            | ChannelDecl::Compose { name, .. }
            | ChannelDecl::Classical { name, .. } => name,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TaskDecl {
    Teleportation {
        d: usize,
    },
    DenseCoding {
        d: usize,
    },
    EntangledPair {
        algebra: String,
        representation: String,
    },
    Transform {
        channel: String,
        #[serde(default)]
        cocycle: Option<String>,
        #[serde(default)]
        representation: Option<String>,
    },
    CodingSchemes {
        channel: String,
        representation: String,
    },
    Capacity {
        channel: String,
        #[serde(default)]
        representation: Option<String>,
    },
    RandomTransforms {
        algebra: String,
        representation: String,
        count: usize,
    },
    Functoriality {
        first: String,
        second: String,
        cocycle: String,
    },
    CoboundaryCaveat {
        channel: String,
        cocycle: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemaError {
    pub message: String,
    pub line: Option<usize>,
}

impl fmt::Display for SchemaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "schema error at line {l}: {}", self.message),
            None => write!(f, "schema error: {}", self.message),
        }
    }
}

impl std::error::Error for SchemaError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Toml,
}

/// JSON if the extension says so or the text opens with `{`; TOML otherwise.
pub fn detect_format(path: Option<&str>, text: &str) -> Format {
    match path.and_then(|p| p.rsplit_once('.')).map(|(_, e)| e) {
        Some("toml") => Format::Toml,
        Some("json") => Format::Json,
        _ if text.trim_start().starts_with('{') => Format::Json,
        _ => Format::Toml,
    }
}

pub fn parse(text: &str, format: Format) -> Result<SceneFile, SchemaError> {
    match format {
        Format::Json => serde_json::from_str(text).map_err(|e| SchemaError {
            line: Some(e.line()),
            message: e.to_string(),
        }),
        Format::Toml => toml::from_str(text).map_err(|e| SchemaError {
            line: e.span().map(|s| text[..s.start].matches('\n').count() + 1),
            message: e.message().to_string(),
        }),
    }
}

/// A declared cocycle. Invalid tables are kept so that `check` can report them.
#[derive(Debug, Clone)]
pub struct CocycleEntry {
    pub group: FiniteAbelianGroup,
    pub report: Result<CocycleReport, String>,
    pub cocycle: Option<Cocycle2>,
    /// Set for `weyl:d`; lets `capacity --quantum-image` find a representation.
    pub weyl_degree: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct RepEntry {
    pub cocycle_name: Option<String>,
    pub rep: Result<ProjectiveRep, String>,
}

#[derive(Debug, Clone)]
pub enum AlgebraEntry {
    Plain(Arc<FrobeniusAlgebra>),
    Graded(GradedAlgebra),
}

impl AlgebraEntry {
    pub fn algebra(&self) -> &Arc<FrobeniusAlgebra> {
        match self {
            AlgebraEntry::Plain(a) => a,
            AlgebraEntry::Graded(g) => g.algebra(),
        }
    }
}

#[derive(Debug, Clone)]
pub enum ChannelEntry {
    Quantum {
        map: ChannelMap,
        source: String,
        target: String,
    },
    /// Kept unvalidated; `check` reports the stochasticity residuals.
    Classical { rows: Vec<Vec<f64>> },
}

impl ChannelEntry {
    pub fn classical(&self) -> Result<ClassicalChannel, String> {
        match self {
            ChannelEntry::Classical { rows } => ClassicalChannel::from_rows(rows).map_err(|e| e.to_string()),
            ChannelEntry::Quantum { .. } => Err("not a classical channel".into()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Named<T> {
    pub name: String,
    pub value: T,
}

/// A resolved scene: every name points at a constructed object.
#[derive(Debug, Clone, Default)]
pub struct World {
    pub name: String,
    pub groups: Vec<Named<FiniteAbelianGroup>>,
    pub cocycles: Vec<Named<CocycleEntry>>,
    pub representations: Vec<Named<RepEntry>>,
    pub algebras: Vec<Named<AlgebraEntry>>,
    pub channels: Vec<Named<ChannelEntry>>,
    pub tasks: Vec<TaskDecl>,
}

fn find<'a, T>(items: &'a [Named<T>], name: &str) -> Option<&'a T> {
    items.iter().find(|n| n.name == name).map(|n| &n.value)
}

impl World {
    pub fn group(&self, name: &str) -> Option<&FiniteAbelianGroup> {
        find(&self.groups, name)
    }
    pub fn cocycle(&self, name: &str) -> Option<&CocycleEntry> {
        find(&self.cocycles, name)
    }
    pub fn representation(&self, name: &str) -> Option<&RepEntry> {
        find(&self.representations, name)
    }
    pub fn algebra(&self, name: &str) -> Option<&AlgebraEntry> {
        find(&self.algebras, name)
    }
    pub fn channel(&self, name: &str) -> Option<&ChannelEntry> {
        find(&self.channels, name)
    }

    /// A representation with cocycle `name`: a declared one, else the clock-shift
    /// representation if the cocycle is `weyl:d`.
    pub fn representation_for(&self, cocycle: &str) -> Result<ProjectiveRep, String> {
        if let Some(r) = self
            .representations
            .iter()
            .find(|r| r.value.cocycle_name.as_deref() == Some(cocycle))
        {
            return r.value.rep.clone();
        }
        match self.cocycle(cocycle).and_then(|c| c.weyl_degree) {
            Some(d) => clock_shift_rep(d).map_err(|e| e.to_string()),
            None => Err(format!("no representation declared for cocycle '{cocycle}'")),
        }
    }
}

/// Builds [`SchemaError`]s, locating the offending token in the source text.
struct Locator<'a> {
    text: &'a str,
}

impl Locator<'_> {
    fn line_of(&self, token: &str) -> Option<usize> {
        let quoted = format!("\"{token}\"");
        self.text
            .lines()
            .position(|l| l.contains(&quoted))
            .map(|i| i + 1)
    }

    fn error(&self, token: &str, message: String) -> SchemaError {
        SchemaError {
            line: self.line_of(token),
            message,
        }
    }
}

fn matrix_of(spec: &MatrixSpec, what: &str) -> Result<DenseMatrix, String> {
    let rows: Vec<Vec<C64>> = spec
        .iter()
        .map(|r| r.iter().map(|e| e.value()).collect())
        .collect();
    DenseMatrix::from_rows(&rows).map_err(|e| format!("{what}: {e}"))
}

fn parse_generator(g: &str, prefix: &str) -> Option<usize> {
    g.strip_prefix(prefix)?.strip_prefix(':')?.parse().ok()
}

/// Resolve names in declaration order and construct every object.
/// `rng` feeds the random channel kinds.
pub fn resolve(scene: SceneFile, text: &str, rng: &mut ChaCha8Rng) -> Result<World, SchemaError> {
    let loc = Locator { text };
    let mut w = World {
        name: scene.name.unwrap_or_else(|| "scene".into()),
        ..World::default()
    };
    let mut seen: Vec<String> = Vec::new();
    let mut declare = |name: &str| -> Result<(), SchemaError> {
        if seen.iter().any(|s| s == name) {
            return Err(loc.error(name, format!("name '{name}' is declared twice")));
        }
        seen.push(name.to_string());
        Ok(())
    };

    for g in scene.groups {
        declare(&g.name)?;
        let group = FiniteAbelianGroup::new(g.orders.clone())
            .map_err(|e| loc.error(&g.name, format!("group '{}': {e}", g.name)))?;
        w.groups.push(Named { name: g.name, value: group });
    }

    for c in scene.cocycles {
        declare(&c.name)?;
        let err = |m: String| loc.error(&c.name, format!("cocycle '{}': {m}", c.name));
        let declared_group = match &c.group {
            Some(gname) => Some(
                w.group(gname)
                    .cloned()
                    .ok_or_else(|| loc.error(gname, format!("unknown group '{gname}' in cocycle '{}'", c.name)))?,
            ),
            None => None,
        };
        let entry = match (&c.generator, &c.table) {
            (Some(gen), None) => {
                if let Some(d) = parse_generator(gen, "weyl") {
                    let psi = weyl_cocycle(d).map_err(|e| err(e.to_string()))?;
                    if let Some(g) = &declared_group {
                        if g != psi.group() {
                            return Err(err(format!("weyl:{d} lives on Z{d} x Z{d}, not on {:?}", g.orders())));
                        }
                    }
                    CocycleEntry {
                        group: psi.group().clone(),
                        report: Ok(psi.report()),
                        cocycle: Some(psi),
                        weyl_degree: Some(d),
                    }
                } else if gen == "trivial" {
                    let g = declared_group.ok_or_else(|| err("the trivial cocycle needs a group".into()))?;
                    let psi = Cocycle2::trivial(&g);
                    CocycleEntry {
                        group: g,
                        report: Ok(psi.report()),
                        cocycle: Some(psi),
                        weyl_degree: None,
                    }
                } else {
                    return Err(err(format!("unknown generator '{gen}' (expected weyl:d or trivial)")));
                }
            }
            (None, Some(table)) => {
                let g = declared_group.ok_or_else(|| err("a cocycle table needs a group".into()))?;
                let m = matrix_of(table, "table").map_err(err)?;
                let n = g.order();
                if m.shape() != (n, n) {
                    return Err(err(format!("table must be {n}x{n}, got {}x{}", m.rows(), m.cols())));
                }
                let entries = m.entries().to_vec();
                let report = check_cocycle(&g, &entries).map_err(|e| e.to_string());
                let cocycle = Cocycle2::new(g.clone(), entries).ok();
                CocycleEntry {
                    group: g,
                    report,
                    cocycle,
                    weyl_degree: None,
                }
            }
            _ => return Err(err("give exactly one of 'generator' and 'table'".into())),
        };
        w.cocycles.push(Named { name: c.name, value: entry });
    }

    for r in scene.representations {
        declare(&r.name)?;
        let err = |m: String| loc.error(&r.name, format!("representation '{}': {m}", r.name));
        let cocycle = match &r.cocycle {
            Some(cname) => Some(
                w.cocycle(cname)
                    .ok_or_else(|| loc.error(cname, format!("unknown cocycle '{cname}' in representation '{}'", r.name)))?,
            ),
            None => None,
        };
        let rep = match (&r.generator, &r.matrices) {
            (Some(gen), None) => {
                let d = parse_generator(gen, "clock_shift")
                    .ok_or_else(|| err(format!("unknown generator '{gen}' (expected clock_shift:d)")))?;
                let base = clock_shift_rep(d).map_err(|e| err(e.to_string()))?;
                match cocycle {
                    None => Ok(base),
                    Some(entry) => match &entry.cocycle {
                        Some(psi) => ProjectiveRep::new(psi.clone(), base.matrices().to_vec()).map_err(|e| e.to_string()),
                        None => Err("its cocycle is invalid".to_string()),
                    },
                }
            }
            (None, Some(specs)) => {
                let entry = cocycle.ok_or_else(|| err("explicit matrices need a cocycle".into()))?;
                let mats = specs
                    .iter()
                    .map(|m| matrix_of(m, "matrix"))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(err)?;
                if mats.len() != entry.group.order() {
                    return Err(err(format!(
                        "expected {} matrices, one per group element, got {}",
                        entry.group.order(),
                        mats.len()
                    )));
                }
                if mats.iter().any(|m| !m.is_square() || m.shape() != mats[0].shape()) {
                    return Err(err("matrices must be square and of one size".into()));
                }
                match &entry.cocycle {
                    Some(psi) => ProjectiveRep::new(psi.clone(), mats).map_err(|e| e.to_string()),
                    None => Err("its cocycle is invalid".to_string()),
                }
            }
            _ => return Err(err("give exactly one of 'generator' and 'matrices'".into())),
        };
        w.representations.push(Named {
            name: r.name,
            value: RepEntry {
                cocycle_name: r.cocycle,
                rep,
            },
        });
    }

    for a in scene.algebras {
        let name = a.name().to_string();
        declare(&name)?;
        let err = |m: String| loc.error(&name, format!("algebra '{name}': {m}"));
        let entry = match &a {
            AlgebraDecl::Matrix { d, .. } => {
                AlgebraEntry::Plain(Arc::new(matrix_algebra(*d).map_err(|e| err(e.to_string()))?))
            }
            AlgebraDecl::Multimatrix { blocks, .. } => {
                AlgebraEntry::Plain(Arc::new(multimatrix_algebra(blocks).map_err(|e| err(e.to_string()))?))
            }
            AlgebraDecl::Commutative { dim, .. } => {
                AlgebraEntry::Plain(Arc::new(commutative_algebra(*dim).map_err(|e| err(e.to_string()))?))
            }
            AlgebraDecl::GroupAlgebra {
                group,
                subgroup,
                cocycle,
                representation,
                ..
            } => {
                let g = w
                    .group(group)
                    .ok_or_else(|| loc.error(group, format!("unknown group '{group}' in algebra '{name}'")))?;
                let l = match subgroup {
                    Some(gens) => Subgroup::generated(g, gens).map_err(|e| err(e.to_string()))?,
                    None => Subgroup::whole(g),
                };
                let phi = match cocycle {
                    Some(cname) => {
                        let entry = w
                            .cocycle(cname)
                            .ok_or_else(|| loc.error(cname, format!("unknown cocycle '{cname}' in algebra '{name}'")))?;
                        entry
                            .cocycle
                            .clone()
                            .ok_or_else(|| err(format!("cocycle '{cname}' is invalid")))?
                    }
                    None => Cocycle2::trivial(g),
                };
                let mut alg = twisted_group_algebra(&l, &phi).map_err(|e| err(e.to_string()))?;
                if let Some(rname) = representation {
                    let rep = w
                        .representation(rname)
                        .ok_or_else(|| loc.error(rname, format!("unknown representation '{rname}' in algebra '{name}'")))?;
                    let rep = rep.rep.clone().map_err(|e| err(format!("representation '{rname}': {e}")))?;
                    alg = alg.with_rep_presentation(&rep).map_err(|e| err(e.to_string()))?;
                }
                AlgebraEntry::Graded(alg)
            }
            AlgebraDecl::Tensor { factors, .. } => {
                let [x, y] = factors;
                let fx = w
                    .algebra(x)
                    .ok_or_else(|| loc.error(x, format!("unknown algebra '{x}' in algebra '{name}'")))?;
                let fy = w
                    .algebra(y)
                    .ok_or_else(|| loc.error(y, format!("unknown algebra '{y}' in algebra '{name}'")))?;
                AlgebraEntry::Plain(Arc::new(
                    tensor_product(fx.algebra(), fy.algebra()).map_err(|e| err(e.to_string()))?,
                ))
            }
        };
        w.algebras.push(Named { name, value: entry });
    }

    for c in scene.channels {
        let name = c.name().to_string();
        declare(&name)?;
        let err = |m: String| loc.error(&name, format!("channel '{name}': {m}"));
        let alg = |a: &str| -> Result<&AlgebraEntry, SchemaError> {
            w.algebra(a)
                .ok_or_else(|| loc.error(a, format!("unknown algebra '{a}' in channel '{name}'")))
        };
        let graded = |a: &str| -> Result<&GradedAlgebra, SchemaError> {
            match alg(a)? {
                AlgebraEntry::Graded(g) => Ok(g),
                AlgebraEntry::Plain(_) => Err(err(format!("algebra '{a}' is not a group algebra"))),
            }
        };
        let entry = match &c {
            ChannelDecl::Matrix {
                source, target, matrix, ..
            } => {
                let (s, t) = (alg(source)?.algebra().clone(), alg(target)?.algebra().clone());
                let m = matrix_of(matrix, "matrix").map_err(err)?;
                ChannelEntry::Quantum {
                    map: ChannelMap::new(s, t, m).map_err(|e| err(e.to_string()))?,
                    source: source.clone(),
                    target: target.clone(),
                }
            }
            ChannelDecl::Identity { algebra, .. } => ChannelEntry::Quantum {
                map: ChannelMap::identity(alg(algebra)?.algebra().clone()),
                source: algebra.clone(),
                target: algebra.clone(),
            },
            ChannelDecl::CompletelyMixing { source, target, .. } => ChannelEntry::Quantum {
                map: ChannelMap::completely_mixing(alg(source)?.algebra().clone(), alg(target)?.algebra().clone()),
                source: source.clone(),
                target: target.clone(),
            },
            ChannelDecl::Covariant {
                algebra, distribution, ..
            } => ChannelEntry::Quantum {
                map: covariant_channel_from(graded(algebra)?, distribution).map_err(|e| err(e.to_string()))?,
                source: algebra.clone(),
                target: algebra.clone(),
            },
            ChannelDecl::RandomCovariant { algebra, .. } => ChannelEntry::Quantum {
                map: random_covariant_channel(graded(algebra)?, rng).map_err(|e| err(e.to_string()))?,
                source: algebra.clone(),
                target: algebra.clone(),
            },
            ChannelDecl::Compose { outer, inner, .. } => {
                let q = |n: &str| match w.channel(n) {
                    Some(ChannelEntry::Quantum { map, source, target }) => Ok((map, source, target)),
                    Some(ChannelEntry::Classical { .. }) => Err(err(format!("channel '{n}' is classical"))),
                    None => Err(loc.error(n, format!("unknown channel '{n}' in channel '{name}'"))),
                };
                let (o, _, ot) = q(outer)?;
                let (i, is, _) = q(inner)?;
                ChannelEntry::Quantum {
                    map: compose(o, i).map_err(|e| err(e.to_string()))?,
                    source: is.clone(),
                    target: ot.clone(),
                }
            }
            ChannelDecl::Classical { matrix, .. } => {
                let cols = matrix.first().map_or(0, Vec::len);
                if matrix.is_empty() || cols == 0 || matrix.iter().any(|r| r.len() != cols) {
                    return Err(err("classical matrix must be a nonempty rectangular array".into()));
                }
                ChannelEntry::Classical { rows: matrix.clone() }
            }
        };
        w.channels.push(Named { name, value: entry });
    }

    for t in &scene.tasks {
        validate_task(&w, t, &loc)?;
    }
    w.tasks = scene.tasks;
    Ok(w)
}

/// Static checks on a task: names exist and have the right kind.
fn validate_task(w: &World, t: &TaskDecl, loc: &Locator<'_>) -> Result<(), SchemaError> {
    let graded_alg = |a: &str| match w.algebra(a) {
        Some(AlgebraEntry::Graded(_)) => Ok(()),
        Some(AlgebraEntry::Plain(_)) => Err(loc.error(a, format!("task needs a group algebra, '{a}' is not one"))),
        None => Err(loc.error(a, format!("unknown algebra '{a}' in task"))),
    };
    let graded_channel = |c: &str| match w.channel(c) {
        Some(ChannelEntry::Quantum { source, target, .. }) => graded_alg(source).and(graded_alg(target)),
        Some(ChannelEntry::Classical { .. }) => Err(loc.error(c, format!("task needs a channel between group algebras, '{c}' is classical"))),
        None => Err(loc.error(c, format!("unknown channel '{c}' in task"))),
    };
    let cocycle = |c: &str| w.cocycle(c).map(|_| ()).ok_or_else(|| loc.error(c, format!("unknown cocycle '{c}' in task")));
    let rep = |r: &str| {
        w.representation(r)
            .map(|_| ())
            .ok_or_else(|| loc.error(r, format!("unknown representation '{r}' in task")))
    };
    match t {
        TaskDecl::Teleportation { d } | TaskDecl::DenseCoding { d } => {
            if *d < 2 {
                return Err(SchemaError {
                    line: None,
                    message: format!("coding task needs d >= 2, got {d}"),
                });
            }
            Ok(())
        }
        TaskDecl::EntangledPair { algebra, representation } => graded_alg(algebra).and(rep(representation)),
        TaskDecl::Transform {
            channel: c,
            cocycle: psi,
            representation: r,
        } => {
            graded_channel(c)?;
            match (psi, r) {
                (Some(p), None) => cocycle(p),
                (None, Some(r)) => rep(r),
                _ => Err(loc.error(c, "transform task needs exactly one of 'cocycle' and 'representation'".into())),
            }
        }
        TaskDecl::CodingSchemes {
            channel: c,
            representation,
        } => graded_channel(c).and(rep(representation)),
        TaskDecl::Capacity {
            channel: c,
            representation,
        } => {
            match (representation, w.channel(c)) {
                (Some(r), _) => graded_channel(c).and(rep(r)),
                (None, Some(ChannelEntry::Classical { .. })) => Ok(()),
                (None, _) => graded_channel(c),
            }
        }
        TaskDecl::RandomTransforms {
            algebra, representation, ..
        } => graded_alg(algebra).and(rep(representation)),
        TaskDecl::Functoriality { first, second, cocycle: p } => {
            graded_channel(first)?;
            graded_channel(second)?;
            cocycle(p)
        }
        TaskDecl::CoboundaryCaveat { channel: c, cocycle: p } => graded_channel(c).and(cocycle(p)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn world(text: &str) -> Result<World, SchemaError> {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        resolve(parse(text, detect_format(None, text))?, text, &mut rng)
    }

    #[test]
    fn format_detection() {
        assert_eq!(detect_format(Some("a.toml"), "{"), Format::Toml);
        assert_eq!(detect_format(Some("a.json"), "x = 1"), Format::Json);
        assert_eq!(detect_format(None, "  {\"groups\": []}"), Format::Json);
        assert_eq!(detect_format(Some("-"), "name = \"x\""), Format::Toml);
    }

    #[test]
    fn entries_accept_pairs_and_reals() {
        let m: MatrixSpec = serde_json::from_str("[[[1, 2], 3.5], [0, [0, -1]]]").unwrap();
        let d = matrix_of(&m, "m").unwrap();
        assert_eq!(d[(0, 0)], C64::new(1.0, 2.0));
        assert_eq!(d[(0, 1)], C64::new(3.5, 0.0));
        assert_eq!(d[(1, 1)], C64::new(0.0, -1.0));
    }

    #[test]
    fn weyl_generator_must_match_group() {
        let ok = r#"{"groups": [{"name": "G", "orders": [3, 3]}],
                     "cocycles": [{"name": "w", "group": "G", "generator": "weyl:3"}]}"#;
        assert_eq!(world(ok).unwrap().cocycle("w").unwrap().weyl_degree, Some(3));
        let bad = r#"{"groups": [{"name": "G", "orders": [2, 2]}],
                      "cocycles": [{"name": "w", "group": "G", "generator": "weyl:3"}]}"#;
        assert!(world(bad).is_err());
    }

    #[test]
    fn representation_lookup_falls_back_to_clock_shift() {
        let w = world(r#"{"cocycles": [{"name": "w", "generator": "weyl:2"}]}"#).unwrap();
        assert_eq!(w.representation_for("w").unwrap().degree(), 2);
        let w = world(r#"{"groups": [{"name": "G", "orders": [2]}],
                          "cocycles": [{"name": "t", "group": "G", "generator": "trivial"}]}"#)
        .unwrap();
        assert!(w.representation_for("t").is_err());
    }

    #[test]
    fn channel_shape_is_checked() {
        let text = r#"{"algebras": [{"name": "A", "kind": "matrix", "d": 2}],
                       "channels": [{"name": "f", "kind": "matrix", "source": "A", "target": "A",
                                     "matrix": [[1, 0], [0, 1]]}]}"#;
        assert!(world(text).unwrap_err().message.contains("channel 'f'"));
    }

    #[test]
    fn tasks_need_group_algebras() {
        let text = r#"{"algebras": [{"name": "A", "kind": "matrix", "d": 2}],
                       "representations": [],
                       "channels": [{"name": "f", "kind": "identity", "algebra": "A"}],
                       "tasks": [{"kind": "capacity", "channel": "f"}]}"#;
        assert!(world(text).unwrap_err().message.contains("not one"));
    }
}
