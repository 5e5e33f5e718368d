//! `{"re": .., "im": ..}` JSON representation for complex values.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::poly::C64;

#[derive(Serialize, Deserialize)]
struct Point {
    re: f64,
    im: f64,
}

pub fn serialize<S: Serializer>(z: &C64, s: S) -> Result<S::Ok, S::Error> {
    Point { re: z.re, im: z.im }.serialize(s)
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<C64, D::Error> {
    let p = Point::deserialize(d)?;
    Ok(C64::new(p.re, p.im))
}

pub mod vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[C64], s: S) -> Result<S::Ok, S::Error> {
        let pts: Vec<Point> = v.iter().map(|z| Point { re: z.re, im: z.im }).collect();
        pts.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<C64>, D::Error> {
        let pts = Vec::<Point>::deserialize(d)?;
        Ok(pts.into_iter().map(|p| C64::new(p.re, p.im)).collect())
    }
}
