//! Shared spec-construction arguments: group description, subsets as
//! parenthesized coordinate tuples, variant.

use anyhow::{anyhow, bail, Context, Result};
use clap::Args;
use mirror_core::groups::{AbelianView, GroupSpec, Subset};
use mirror_core::mirror::{MirrorSpec, Variant};

#[derive(Args, Debug, Clone)]
pub struct SpecArgs {
    /// Abelian group as cyclic factors, e.g. "2x9" or "6x6"
    #[arg(long, conflicts_with_all = ["cayley_file", "spec_json"])]
    pub group: Option<String>,

    /// Cayley table file: first token n, then n×n element indices
    #[arg(long, conflicts_with = "spec_json")]
    pub cayley_file: Option<std::path::PathBuf>,

    /// Subset A: coordinate tuples "(0,0),(0,1)" (abelian, in the factors
    /// given to --group) or bare indices "0,1" (Cayley)
    #[arg(long, rename_all = "screaming_snake_case", id = "A")]
    pub a: Option<String>,

    /// Subset B, same syntax as A
    #[arg(long, id = "B")]
    pub b: Option<String>,

    /// symmetric | asymmetric
    #[arg(long, default_value = "symmetric")]
    pub variant: String,

    /// Whole spec as single-line JSON (alternative to the flags above)
    #[arg(long)]
    pub spec_json: Option<String>,
}

pub fn parse_tuples(s: &str) -> Result<Vec<Vec<u64>>> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    if !s.contains('(') {
        // bare index list
        return s
            .split(',')
            .map(|t| {
                Ok(vec![t
                    .trim()
                    .parse::<u64>()
                    .with_context(|| format!("bad index {t:?}"))?])
            })
            .collect();
    }
    let mut out = Vec::new();
    let mut rest = s;
    while let Some(open) = rest.find('(') {
        let close = rest[open..]
            .find(')')
            .ok_or_else(|| anyhow!("unbalanced parenthesis in {s:?}"))?
            + open;
        let tuple: Result<Vec<u64>> = rest[open + 1..close]
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u64>()
                    .with_context(|| format!("bad coordinate {t:?}"))
            })
            .collect();
        out.push(tuple?);
        rest = &rest[close + 1..];
    }
    Ok(out)
}

impl SpecArgs {
    pub fn build(&self) -> Result<MirrorSpec> {
        if let Some(json) = &self.spec_json {
            return MirrorSpec::from_json(json).map_err(|e| anyhow!("{e}"));
        }
        let variant = match self.variant.as_str() {
            "symmetric" => Variant::Symmetric,
            "asymmetric" => Variant::Asymmetric,
            other => bail!("unknown variant {other:?} (use symmetric|asymmetric)"),
        };
        let (group, view): (GroupSpec, Option<AbelianView>) = if let Some(g) = &self.group {
            let (g, v) = GroupSpec::parse_abelian_with_view(g).map_err(|e| anyhow!("{e}"))?;
            (g, Some(v))
        } else if let Some(path) = &self.cayley_file {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            let (g, _report) = GroupSpec::parse_cayley_text(&text).map_err(|e| anyhow!("{e}"))?;
            (g, None)
        } else {
            bail!("one of --group, --cayley-file, --spec-json is required");
        };
        let subset = |txt: &Option<String>| -> Result<Subset> {
            let Some(txt) = txt else {
                return Ok(Subset::empty());
            };
            let tuples = parse_tuples(txt)?;
            let mut members = Vec::with_capacity(tuples.len());
            for t in &tuples {
                let e = match &view {
                    Some(v) => v.element(&group, t).map_err(|e| anyhow!("{e}"))?,
                    None => {
                        if t.len() != 1 {
                            bail!("Cayley groups take bare element indices");
                        }
                        group.element(t[0] as usize).map_err(|e| anyhow!("{e}"))?
                    }
                };
                members.push(e.0);
            }
            Subset::new(&group, members).map_err(|e| anyhow!("{e}"))
        };
        let a = subset(&self.a)?;
        let b = subset(&self.b)?;
        Ok(MirrorSpec::new(group, a, b, variant))
    }
}
