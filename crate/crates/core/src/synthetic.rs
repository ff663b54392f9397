//! Synthetic sector worlds: assets whose densities cluster around a few
//! sector centres on the factor space.

use crate::error::{Error, Result};
use crate::grid::{mixture_profile, Grid, MixtureComponent, SensitivityProfile};
use crate::rng::{substream, Purpose};
use rand::Rng;
use rand_distr::StandardNormal;

#[derive(Debug, Clone, PartialEq)]
pub struct SectorWorld {
    pub labels: Vec<String>,
    /// Sector index of each asset.
    pub sectors: Vec<usize>,
    pub profiles: Vec<SensitivityProfile>,
}

impl SectorWorld {
    pub fn sector_name(index: usize) -> String {
        format!("sector{index}")
    }
}

/// `assets` assets split into `sectors` contiguous, near-equal blocks.
/// Sector `k` is centred at the midpoint of the `k`-th equal slice of the
/// grid range; each asset is a two-component mixture with means jittered
/// around that centre.
pub fn sector_profiles(grid: Grid, sectors: usize, assets: usize, seed: u64) -> Result<SectorWorld> {
    if sectors == 0 || assets < sectors {
        return Err(Error::TooFewAssets {
            required: sectors.max(1),
            found: assets,
        });
    }
    let range = grid.upper() - grid.lower();
    let slice = range / sectors as f64;
    let mut world = SectorWorld {
        labels: Vec::new(),
        sectors: Vec::new(),
        profiles: Vec::new(),
    };
    for k in 0..sectors {
        let center = grid.lower() + (k as f64 + 0.5) * slice;
        let members = (k + 1) * assets / sectors - k * assets / sectors;
        for a in 0..members {
            let index = world.labels.len();
            let mut rng = substream(seed, Purpose::Synthetic, index as u64);
            let components: Vec<MixtureComponent> = (0..2)
                .map(|_| {
                    let jitter: f64 = rng.sample(StandardNormal);
                    MixtureComponent::new(
                        rng.random_range(0.5..1.5),
                        center + 0.15 * slice * jitter,
                        range * rng.random_range(0.04..0.09),
                    )
                })
                .collect();
            world.profiles.push(mixture_profile(grid, &components)?);
            world.labels.push(format!("S{k}A{a:02}"));
            world.sectors.push(k);
        }
    }
    Ok(world)
}
