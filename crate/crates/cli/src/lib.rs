//! Scene-driven front end for `entsym`: load a scene, check its objects, run
//! its tasks and produce a deterministic report.

pub mod report;
pub mod run;
pub mod scene;

use entsym::Tolerance;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use report::{Item, Report};
use scene::{detect_format, parse, resolve, ChannelEntry, Format, Named, RepEntry, SchemaError, TaskDecl, World};

/// Bundled demo scenes.
pub const DEMOS: [(&str, &str, Format); 4] = [
    ("teleport-d2", include_str!("../scenes/teleport-d2.json"), Format::Json),
    ("teleport-d3", include_str!("../scenes/teleport-d3.json"), Format::Json),
    ("densecode-d2", include_str!("../scenes/densecode-d2.json"), Format::Json),
    ("bsc-capacity", include_str!("../scenes/bsc-capacity.toml"), Format::Toml),
];

pub fn demo_scene(name: &str) -> Option<(&'static str, Format)> {
    DEMOS.iter().find(|(n, _, _)| *n == name).map(|(_, text, f)| (*text, *f))
}

#[derive(Debug, Clone, Copy)]
pub struct Settings {
    pub tol: Tolerance,
    pub seed: u64,
}

/// A scene ready to run, with the RNG state left after resolution.
pub struct Loaded {
    pub world: World,
    pub rng: ChaCha8Rng,
}

pub fn load(text: &str, format: Format, settings: &Settings) -> Result<Loaded, SchemaError> {
    let scene = parse(text, format)?;
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    let world = resolve(scene, text, &mut rng)?;
    Ok(Loaded { world, rng })
}

/// Read `path`, or stdin for `-`, and load it.
pub fn load_path(path: &str, settings: &Settings) -> Result<Loaded, SchemaError> {
    let text = if path == "-" {
        std::io::read_to_string(std::io::stdin())
    } else {
        std::fs::read_to_string(path)
    }
    .map_err(|e| SchemaError {
        message: format!("cannot read {path}: {e}"),
        line: None,
    })?;
    let hint = (path != "-").then_some(path);
    load(&text, detect_format(hint, &text), settings)
}

/// Every declared object, then every task in order.
pub fn cmd_check(loaded: Loaded, settings: &Settings) -> Report {
    let Loaded { world, mut rng } = loaded;
    let mut items = run::check_objects(&world, &settings.tol);
    items.extend(world.tasks.iter().map(|t| run::run_task(&world, t, &settings.tol, &mut rng)));
    Report::new(&world.name, settings.tol.epsilon, settings.seed, items)
}

fn single(loaded: Loaded, settings: &Settings, task: TaskDecl) -> Report {
    let Loaded { world, mut rng } = loaded;
    let items: Vec<Item> = vec![run::run_task(&world, &task, &settings.tol, &mut rng)];
    Report::new(&world.name, settings.tol.epsilon, settings.seed, items)
}

fn unknown(kind: &str, name: &str) -> SchemaError {
    SchemaError {
        message: format!("unknown {kind} '{name}'"),
        line: None,
    }
}

fn require_graded_channel(world: &World, channel: &str) -> Result<(), SchemaError> {
    match world.channel(channel) {
        None => Err(unknown("channel", channel)),
        Some(ChannelEntry::Classical { .. }) => Err(SchemaError {
            message: format!("channel '{channel}' is classical"),
            line: None,
        }),
        Some(ChannelEntry::Quantum { .. }) => Ok(()),
    }
}

pub fn cmd_transform(loaded: Loaded, settings: &Settings, cocycle: &str, channel: &str) -> Result<Report, SchemaError> {
    require_graded_channel(&loaded.world, channel)?;
    if loaded.world.cocycle(cocycle).is_none() {
        return Err(unknown("cocycle", cocycle));
    }
    let task = TaskDecl::Transform {
        channel: channel.to_string(),
        cocycle: Some(cocycle.to_string()),
        representation: None,
    };
    Ok(single(loaded, settings, task))
}

/// Capacity of a classical channel, of the factor-basis matrix of a covariant
/// quantum channel, or with `quantum_image` the certified capacities of the
/// channel's image under the twist by that cocycle.
pub fn cmd_capacity(
    mut loaded: Loaded,
    settings: &Settings,
    channel: &str,
    quantum_image: Option<&str>,
) -> Result<Report, SchemaError> {
    let world = &mut loaded.world;
    if world.channel(channel).is_none() {
        return Err(unknown("channel", channel));
    }
    let representation = match quantum_image {
        None => None,
        Some(c) => {
            require_graded_channel(world, channel)?;
            if world.cocycle(c).is_none() {
                return Err(unknown("cocycle", c));
            }
            let declared = world
                .representations
                .iter()
                .find(|r| r.value.cocycle_name.as_deref() == Some(c))
                .map(|r| r.name.clone());
            Some(match declared {
                Some(name) => name,
                None => {
                    let name = format!("{c}:representation");
                    let rep = world.representation_for(c);
                    world.representations.push(Named {
                        name: name.clone(),
                        value: RepEntry {
                            cocycle_name: Some(c.to_string()),
                            rep,
                        },
                    });
                    name
                }
            })
        }
    };
    let task = TaskDecl::Capacity {
        channel: channel.to_string(),
        representation,
    };
    Ok(single(loaded, settings, task))
}
