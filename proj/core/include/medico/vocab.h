// Copyright 2026 The Medico Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MEDICO_VOCAB_H_
#define MEDICO_VOCAB_H_

#include <string>
#include <string_view>

#include "medico/store/term.h"

// IRIs of the vocabulary shared by the ontology, DICOM, annotation and
// dialogue layers. Everything under `medico:` is minted by this project.
namespace medico::vocab {

inline constexpr std::string_view kRdf = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
inline constexpr std::string_view kRdfs = "http://www.w3.org/2000/01/rdf-schema#";
inline constexpr std::string_view kXsd = "http://www.w3.org/2001/XMLSchema#";
inline constexpr std::string_view kMedico = "urn:medico:ns:";

inline Term Rdf(std::string_view local) { return Term::Iri(std::string(kRdf) + std::string(local)); }
inline Term Rdfs(std::string_view local) { return Term::Iri(std::string(kRdfs) + std::string(local)); }
inline Term Xsd(std::string_view local) { return Term::Iri(std::string(kXsd) + std::string(local)); }
inline Term Medico(std::string_view local) { return Term::Iri(std::string(kMedico) + std::string(local)); }

inline Term Type() { return Rdf("type"); }
inline Term Label() { return Rdfs("label"); }

// Ontology layer.
inline Term Concept() { return Medico("Concept"); }
inline Term Synonym() { return Medico("synonym"); }
inline Term IsA() { return Medico("isA"); }
inline Term PartOf() { return Medico("partOf"); }
inline Term Source() { return Medico("source"); }
inline Term Code() { return Medico("code"); }
// Optional phrase used when a concept is mentioned inside generated text.
inline Term Phrase() { return Medico("phrase"); }

// DICOM hierarchy.
inline Term Patient() { return Medico("Patient"); }
inline Term Study() { return Medico("Study"); }
inline Term Series() { return Medico("Series"); }
inline Term Image() { return Medico("Image"); }
inline Term HasStudy() { return Medico("hasStudy"); }
inline Term HasSeries() { return Medico("hasSeries"); }
inline Term HasImage() { return Medico("hasImage"); }
inline Term PatientId() { return Medico("patientId"); }
inline Term PatientName() { return Medico("patientName"); }
inline Term StudyInstanceUid() { return Medico("studyInstanceUid"); }
inline Term StudyDate() { return Medico("studyDate"); }
inline Term SeriesInstanceUid() { return Medico("seriesInstanceUid"); }
inline Term Modality() { return Medico("modality"); }
inline Term SeriesDescription() { return Medico("seriesDescription"); }
inline Term BodyPartExamined() { return Medico("bodyPartExamined"); }
inline Term SopInstanceUid() { return Medico("sopInstanceUid"); }
// Free-text report attached to a study.
inline Term FindingsText() { return Medico("findingsText"); }

// Annotation schema.
inline Term ImageRegion() { return Medico("ImageRegion"); }
inline Term VolumeRegion() { return Medico("VolumeRegion"); }
inline Term RegionOf() { return Medico("regionOf"); }
inline Term Geometry() { return Medico("geometry"); }
inline Term ImageAnnotation() { return Medico("ImageAnnotation"); }
inline Term Annotates() { return Medico("annotates"); }
inline Term Anatomy() { return Medico("anatomy"); }
inline Term Visual() { return Medico("visual"); }
inline Term Disease() { return Medico("disease"); }
inline Term FreeTextValue() { return Medico("hasFreetextValue"); }
inline Term FreeTextComment() { return Medico("hasFreetextComment"); }
inline Term Confidence() { return Medico("confidence"); }
inline Term User() { return Medico("user"); }
inline Term Timestamp() { return Medico("timestamp"); }
inline Term Origin() { return Medico("origin"); }
inline Term SupersededBy() { return Medico("supersededBy"); }
inline Term Landmark() { return Medico("Landmark"); }
inline Term LandmarkName() { return Medico("landmarkName"); }
inline Term Position() { return Medico("position"); }
inline Term InVolume() { return Medico("inVolume"); }
// Objects of medico:origin.
inline Term ManualOrigin() { return Medico("manual"); }
inline Term AutomaticOrigin() { return Medico("automatic"); }

// Prefix used for minted entity IRIs: urn:medico:<kind>:<id>.
inline std::string MintedIri(std::string_view kind, std::string_view id) {
  return "urn:medico:" + std::string(kind) + ":" + std::string(id);
}

}  // namespace medico::vocab

#endif  // MEDICO_VOCAB_H_
