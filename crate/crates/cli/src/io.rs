use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use hdpl_core::gameboard::{parse_tree, GameboardTree};
use hdpl_core::kripke::{KripkeModel, ModelFile, PointedModel};
use hdpl_core::syntax::{parse_sentence, FragmentConfig, Sentence, Signature};

/// `@path` reads the text from a file; anything else is taken literally.
pub fn text_arg(arg: &str) -> Result<String> {
    match arg.strip_prefix('@') {
        Some(path) => fs::read_to_string(path).with_context(|| format!("reading {path}")),
        None => Ok(arg.to_string()),
    }
}

pub fn load_model(path: &Path) -> Result<KripkeModel> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let file: ModelFile = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    file.into_model().with_context(|| format!("loading {}", path.display()))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SignatureFile {
    #[serde(default)]
    nominals: Vec<String>,
    #[serde(default)]
    relations: Vec<String>,
    #[serde(default)]
    props: Vec<String>,
}

pub fn load_signature(path: &Path) -> Result<Signature> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let file: SignatureFile = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    Signature::new(file.nominals, file.relations, file.props).with_context(|| format!("loading {}", path.display()))
}

pub fn pointed(model: KripkeModel, state: &str) -> Result<PointedModel> {
    PointedModel::at(model, state).with_context(|| format!("choosing state `{state}`"))
}

/// `model.json:state`, split at the last colon.
pub fn load_pointed(spec: &str) -> Result<PointedModel> {
    let Some((path, state)) = spec.rsplit_once(':') else {
        bail!("expected FILE:STATE, got `{spec}`");
    };
    pointed(load_model(Path::new(path))?, state)
}

pub fn sentence_arg(arg: &str, model: &KripkeModel, frag: &FragmentConfig) -> Result<Sentence> {
    sentence_over(arg, model.sig(), frag)
}

pub fn sentence_over(arg: &str, sig: &Signature, frag: &FragmentConfig) -> Result<Sentence> {
    Ok(parse_sentence(&text_arg(arg)?, sig, frag)?)
}

pub fn tree_arg(arg: &str, model: &KripkeModel) -> Result<GameboardTree> {
    Ok(parse_tree(&text_arg(arg)?, model.sig())?)
}

pub fn write_model(path: &Path, m: &KripkeModel) -> Result<()> {
    let text = serde_json::to_string_pretty(&m.to_file())?;
    fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
}

/// Prints either the JSON value or the human-readable text.
pub fn emit<T: Serialize>(json: bool, value: &T, text: impl FnOnce() -> String) -> Result<()> {
    if json {
        println!("{}", serde_json::to_string_pretty(value)?);
    } else {
        println!("{}", text());
    }
    Ok(())
}
