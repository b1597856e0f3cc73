/// `Vec<Option<usize>>` as a JSON array of integers with `-1` for `None`.
pub mod noise_labels {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Option<usize>], s: S) -> Result<S::Ok, S::Error> {
        v.iter()
            .map(|l| l.map_or(-1, |c| c as i64))
            .collect::<Vec<i64>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Option<usize>>, D::Error> {
        Vec::<i64>::deserialize(d)?
            .into_iter()
            .map(|l| match l {
                -1 => Ok(None),
                l if l >= 0 => Ok(Some(l as usize)),
                l => Err(serde::de::Error::custom(format!("invalid label {l}"))),
            })
            .collect()
    }
}
