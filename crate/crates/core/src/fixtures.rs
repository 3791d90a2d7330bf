//! The weather station example used throughout the docs and tests: a
//! `weatherstation` type observing air temperature and humidity, and one
//! deployed `demo-weatherstation` watching crop growth.

use crate::ontology::{
    units, Decimal, Measurement, MeasurementCapability, ObservedProperty, PropertyBinding,
    SensorInstance, SensorType, OIOT,
};
use crate::rdf::Iri;

pub fn air_temperature() -> Iri {
    Iri::new(format!("{OIOT}AirTemperature")).unwrap()
}

pub fn humidity() -> Iri {
    Iri::new(format!("{OIOT}Humidity")).unwrap()
}

fn measurement(value: &str, unit: &str) -> Option<Measurement> {
    Some(Measurement {
        value: value.parse::<Decimal>().unwrap(),
        unit: Iri::new(unit).unwrap(),
    })
}

pub fn weather_station() -> SensorType {
    SensorType {
        id: "weatherstation".into(),
        name: "WeatherStation".into(),
        observes: vec![
            ObservedProperty {
                iri: air_temperature(),
                label: Some("Air temperature".into()),
            },
            ObservedProperty {
                iri: humidity(),
                label: Some("Humidity".into()),
            },
        ],
        capabilities: vec![
            MeasurementCapability {
                property: air_temperature(),
                accuracy: measurement("0.5", units::DEGREE_CELSIUS),
                frequency: measurement("1.0", units::HERTZ),
            },
            MeasurementCapability {
                property: humidity(),
                accuracy: measurement("2.0", units::PERCENT),
                frequency: measurement("0.5", units::HERTZ),
            },
        ],
    }
}

pub fn demo_weatherstation() -> SensorInstance {
    SensorInstance {
        id: "demo-weatherstation".into(),
        name: "demo-weatherstation".into(),
        type_id: "weatherstation".into(),
        owner: Some("OpenIoT demo team".into()),
        description: Some("Weather station deployed next to the crop field".into()),
        latitude: "46.5197".parse().unwrap(),
        longitude: "6.5668".parse().unwrap(),
        feature_of_interest: "crop-growth".into(),
        bindings: vec![
            PropertyBinding {
                property: air_temperature(),
                unit: Iri::new(units::DEGREE_CELSIUS).unwrap(),
                xgsn_field: "temp".into(),
            },
            PropertyBinding {
                property: humidity(),
                unit: Iri::new(units::PERCENT).unwrap(),
                xgsn_field: "hum".into(),
            },
        ],
    }
}
