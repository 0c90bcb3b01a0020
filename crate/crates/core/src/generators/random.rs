//! Seeded i.i.d. and periodic baselines.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::core1d::{Alphabet, Block};
use crate::error::{Error, Result};
use crate::grid2d::{Pattern, Rect};

fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParams(format!("probability {p} outside [0,1]")));
    }
    Ok(())
}

/// Binary i.i.d. sequence with `P(1) = p`.
pub fn gen_bernoulli(p: f64, seed: u64, length: usize) -> Result<Block> {
    check_probability(p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = (0..length).map(|_| u16::from(rng.gen_bool(p))).collect();
    Block::new(Alphabet::binary(), data)
}

/// `B B B ...` cut to `length`.
pub fn gen_periodic(b: &Block, length: usize) -> Result<Block> {
    if b.is_empty() {
        return Err(Error::EmptyBlock);
    }
    let data = b.symbols().iter().copied().cycle().take(length).collect();
    Block::new(b.alphabet().clone(), data)
}

/// Binary i.i.d. field on `[0,width) x [0,height)` with `P(1) = p`.
pub fn bernoulli_field(width: usize, height: usize, p: f64, seed: u64) -> Result<Pattern> {
    check_probability(p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..width * height).map(|_| u16::from(rng.gen_bool(p))).collect();
    Pattern::from_rect(Alphabet::binary(), Rect::new(0, 0, width, height), values)
}

/// Square binary field of vertical stripes `stripe_width` columns wide; even
/// stripes have `P(1) = p_even`, odd ones `P(1) = p_odd`.
pub fn striped_field(side: usize, stripe_width: usize, p_even: f64, p_odd: f64, seed: u64) -> Result<Pattern> {
    check_probability(p_even)?;
    check_probability(p_odd)?;
    if stripe_width == 0 {
        return Err(Error::InvalidParams("stripe width must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = Vec::with_capacity(side * side);
    for _y in 0..side {
        for x in 0..side {
            let p = if (x / stripe_width).is_multiple_of(2) { p_even } else { p_odd };
            values.push(u16::from(rng.gen_bool(p)));
        }
    }
    Pattern::from_rect(Alphabet::binary(), Rect::square(0, 0, side), values)
}
