"""Scaffold documents and Markdown authoring sheets with question prompts."""

from __future__ import annotations

from .doc_model import (
    DOC_TITLE_PREFIX,
    SECTION_TITLES,
    SECTIONS,
    SECURITY_SUBSECTION_TITLES,
    SECURITY_SUBSECTIONS,
    DocType,
    Document,
    Kind,
    Profile,
    field_specs,
    is_excluded_by_profile,
    new_empty,
)
from .serialization import META_COMMENT

# Guidance shown next to each field. Datasheet entries keep the question form
# of the Datasheets for Datasets standard; model card entries name the topic.
PROMPTS: dict[str, str] = {
    # model card
    "model_details.developers": "Who developed the model?",
    "model_details.date": "When was the model developed?",
    "model_details.version": "Which version of the model is this?",
    "model_details.version_differences": "How does this version differ from previous versions?",
    "model_details.architecture": "What is the model architecture?",
    "model_details.model_type": "What type of model is it?",
    "model_details.training_algorithms": "Which training algorithms were used?",
    "model_details.training_parameters": "Which training parameters were used?",
    "model_details.training_features": "Which features was the model trained on?",
    "model_details.paper_resources": "Which paper or other resources give more information?",
    "model_details.citation": "How should the model be cited?",
    "model_details.license": "Under which license is the model released?",
    "model_details.contact": "Where can questions or comments about the model be sent?",
    "intended_use.primary_uses": "What are the primary intended uses?",
    "intended_use.primary_users": "Who are the primary intended users?",
    "intended_use.out_of_scope_uses": "Which use cases are out of scope?",
    "intended_use.similar_model_recommendations": "Are other, similar models recommended for some uses?",
    "factors.relevant_factors": "Which factors (groups, instrumentation, environments) are relevant?",
    "factors.evaluation_factors": "Which factors were used in evaluation?",
    "metrics.performance_measures": "Which model performance measures are reported?",
    "metrics.decision_thresholds": "Which decision thresholds are used?",
    "metrics.variation_approaches": "How are variation and uncertainty in the metrics estimated?",
    "evaluation_data.datasets": "Which datasets were used for evaluation?",
    "evaluation_data.motivation": "Why were these evaluation datasets chosen?",
    "evaluation_data.preprocessing": "How was the evaluation data preprocessed?",
    "training_data.datasets": "Which datasets were used for training?",
    "training_data.motivation": "Why were these training datasets chosen?",
    "training_data.preprocessing": "How was the training data preprocessed?",
    "quantitative_analyses.unitary_results": "What are the results per individual factor?",
    "quantitative_analyses.intersectional_results": "What are the results for intersections of factors?",
    "ethical_considerations.risks_harms_mitigations": "Which risks and harms exist and how are they mitigated?",
    "ethical_considerations.human_impact": "How could the model affect people?",
    "ethical_considerations.sensitive_data": "Does the model use sensitive data?",
    "ethical_considerations.challenging_use_cases": "Which use cases are especially challenging?",
    "caveats_recommendations.caveats": "Any additional concerns not covered elsewhere?",
    "security.risk_analysis.data_sensitivity": "How sensitive is the data involved? (none, low, moderate, high)",
    "security.risk_analysis.deployment_breadth": "How widely will the model be deployed? (internal, restricted, public)",
    "security.risk_analysis.access_count": "How many people will have access to the model?",
    "security.risk_analysis.access_levels": "Which levels of access will they have? (end_user, api_consumer, developer, administrator)",
    "security.risk_analysis.attacker_incentives": "Which incentives could attackers have? (monetary_gain, espionage, sabotage, reputation, other)",
    "security.risk_analysis.monetary_use": "Is the model used to achieve monetary gain?",
    "security.data_security.training_data_sources": "Where does the training data come from?",
    "security.data_security.evaluation_data_sources": "Where does the evaluation data come from?",
    "security.data_security.data_sanitization": "Was the training data sanitized? If yes, how?",
    "security.data_security.adversarial_training": "Was adversarial training used? If yes, how?",
    "security.model_security.model_pruning": "Was the model pruned? If yes, to what degree and how?",
    "security.model_security.ensemble_methods": "Are ensemble methods used? If yes, which?",
    "security.model_security.inspection_sanitization": "Was the model inspected and sanitized? If yes, how?",
    "security.model_security.watermarking": "Is the model watermarked for authentication? If yes, how?",
    "security.stealing_inference_mitigations.query_limit": "How many queries are allowed in which time window?",
    "security.stealing_inference_mitigations.behavior_analysis": "Is user behavior analysis in place?",
    "security.stealing_inference_mitigations.user_authentication": "Is user authentication required?",
    "security.stealing_inference_mitigations.secure_data_storage": "Is data stored securely?",
    "security.security_testing.penetration_testing": "Has the model been security tested, e.g. penetration tested?",
    "security.security_testing.results": "What were the results of security testing?",
    "security.security_testing.toolkit_reference": "Which open-source ML security testing toolkit can be used (name or URL)?",
    # datasheet
    "motivation.purpose": "What purpose was the dataset made for?",
    "motivation.creators": "Who created the dataset and on whose behalf?",
    "motivation.funding": "How and by whom was its creation funded?",
    "motivation.comments": "Any other comments?",
    "motivation.attack_risk_purpose": "Does the purpose for which the dataset was created put it at an increased risk of adversarial attacks?",
    "composition.instance_types": "What are the types of instances in the dataset?",
    "composition.sample_or_complete": "Does it contain all possible instances or a sample of a larger set?",
    "composition.raw_or_processed": "Is the data raw data or processed?",
    "composition.labels_targets": "Are labels and targets associated with each instance?",
    "composition.missing_info": "Are any instances missing information?",
    "composition.instance_relationships": "Are relationships between individual instances made clear?",
    "composition.data_splits": "Are data splits like between training and validation data provided and recommended?",
    "composition.errors_noise_redundancies": "Are there any errors, noise or redundancies in the dataset?",
    "composition.self_contained": "Is the dataset self-contained or does it rely on external resources via links?",
    "composition.confidential_data": "Is data that might be seen as confidential part of the dataset like medical data?",
    "composition.offensive_content": "Does the dataset contain data that might be viewed as offensive, insulting or threatening?",
    "composition.identifies_subpopulations": "Does the dataset identify subpopulations, for example by gender or race?",
    "composition.individuals_identifiable": "Can individuals be identified through the data in the dataset directly or indirectly?",
    "composition.sensitive_personal_data": "Is sensitive data, like data on religious beliefs, sexual orientation etc. part of the dataset?",
    "composition.people_comments": "Any additional comments regarding data relating to people in the dataset?",
    "collection.acquisition_method": "How was the data acquired?",
    "collection.mechanisms_validation": "Which mechanisms or procedures were used in collecting the data and how were they validated?",
    "collection.sampling_strategy": "What was the sampling strategy if the data set is a subset of a larger set?",
    "collection.personnel_compensation": "Which personnel was involved in data collection and how was that personnel compensated?",
    "collection.timeframe": "Over what timeframe was the data collected?",
    "collection.ethical_review": "Were there ethical review processes?",
    "collection.obtained_directly_or_third_party": "Was the data related to individual people obtained directly from them or via third parties?",
    "collection.individuals_notified": "Were the people involved made aware of the data collection?",
    "collection.consent_obtained": "Did they consent to it and the use of their data?",
    "collection.consent_revocation_mechanism": "Is there a mechanism in place to revoke consent in the future?",
    "collection.impact_analysis": "Has an impact analysis of the potential impact of the dataset been conducted?",
    "collection.collection_comments": "Any further comments relating to the collection process?",
    "preprocessing.processing_done": "Did the data and the dataset get preprocessed, cleaned or labeled and if so, how was this done?",
    "preprocessing.raw_data_available": "If the data was processed in any way, is the raw data also available?",
    "preprocessing.processing_software_available": "Is the software involved in the processing of the data available?",
    "preprocessing.comments": "Any further comments on data processing?",
    "preprocessing.adversarial_mitigations": "Were mitigations against adversarial attacks conducted?",
    "uses.prior_tasks": "Was the data set used for any tasks already?",
    "uses.usage_repository": "Do all papers or systems using the data set get collected in a repository that links to them?",
    "uses.other_possible_tasks": "Which other tasks could the data set be used for?",
    "uses.composition_impact_future_uses": "Does the composition of the dataset or its processing impact future uses?",
    "uses.prohibited_tasks": "Should the dataset not be used for specific tasks?",
    "uses.comments": "Any other comments on uses of the dataset?",
    "uses.known_attacks_record": "Is there a list of known previous successful attacks on the dataset and any malicious accesses to it?",
    "distribution.external_distribution": "Will the data set be distributed to organizations outside of the one for which it was created?",
    "distribution.method_and_timing": "How and when will the dataset be distributed?",
    "distribution.license_terms": "Will it be distributed under a copyright or intellectual property license or terms of use?",
    "distribution.export_controls": "Do export controls and other regulatory restrictions apply to the data set or instances in it?",
    "distribution.comments": "Any further comments regarding distribution of the dataset?",
    "maintenance.maintainer_contact": "Who will support, host and maintain the dataset and how can they be contacted?",
    "maintenance.erratum": "Is there an erratum?",
    "maintenance.updates_planned.planned": "Will the data set be updated in the future?",
    "maintenance.updates_planned.frequency": "If so, how often?",
    "maintenance.updates_planned.by_whom": "By whom?",
    "maintenance.updates_planned.communication": "How will these updates be communicated?",
    "maintenance.retention_limits": "Are there any limits to the amount of time that data relating to people can be retained for?",
    "maintenance.older_versions_supported": "Will older versions of the data set be supported, hosted and maintained?",
    "maintenance.contribution_mechanism": "Are there mechanisms for others to contribute to the data set and will their contributions be validated?",
    "maintenance.comments": "Any further comments?",
    "maintenance.security_updates.planned": "Will there be security updates to the dataset?",
    "maintenance.security_updates.frequency": "If so, how often will security updates occur?",
    "maintenance.security_updates.by_whom": "By whom will security updates be made?",
    "maintenance.security_updates.communication": "How will security updates be communicated?",
}

RELATES_TO_PEOPLE_PROMPT = "Does the dataset include data relating to people?"

_KIND_HINTS = {
    Kind.TRISTATE: "yes / no / unknown",
    Kind.TRI_DETAIL: "yes / no / unknown, then details if yes",
    Kind.COUNT: "a whole number",
    Kind.QUERY_LIMIT: "max_queries=N window_seconds=S",
}


def prompt_for(path: str) -> str:
    return PROMPTS[path]


def authoring_sheet(doc_type: DocType | str, profile: Profile | str, title: str) -> str:
    """Markdown sheet with every section heading and its question prompts.

    Headings are identical to :func:`serialization.render_markdown`. Prompts
    are blockquotes, so parsing an untouched sheet yields an empty document.
    """
    dt, profile = DocType(doc_type), Profile(profile)
    lines = [
        f"# {DOC_TITLE_PREFIX[dt]}: {title}",
        "",
        META_COMMENT.format(doc_type=dt.value, profile=profile.value, version="1.0"),
        "",
    ]
    if dt is DocType.DATASHEET:
        lines += [f"> **relates_to_people:** {RELATES_TO_PEOPLE_PROMPT} (yes / no / unknown)", ""]
    specs = field_specs(dt)

    def emit(spec, name):
        if is_excluded_by_profile(spec, profile):
            return []
        text = PROMPTS[spec.path]
        if spec.people_conditional:
            text += " (only for datasets relating to people)"
        hint = _KIND_HINTS.get(spec.kind)
        if spec.choices:
            hint = None  # choices are already listed in the prompt
        return [f"> **{name}:** {text}" + (f" ({hint})" if hint else ""), ""]

    for section in SECTIONS[dt]:
        lines += [f"## {SECTION_TITLES[section]}", ""]
        members = [s for s in specs if s.section == section]
        if section == "security":
            if profile is Profile.LEGACY:
                lines += ["> Not part of the legacy profile.", ""]
            for sub in SECURITY_SUBSECTIONS:
                lines += [f"### {SECURITY_SUBSECTION_TITLES[sub]}", ""]
                for spec in members:
                    if spec.key.split(".")[0] == sub:
                        lines += emit(spec, spec.key.split(".", 1)[1])
        else:
            for spec in members:
                lines += emit(spec, spec.key)
    return "\n".join(lines).rstrip("\n") + "\n"


def scaffold(doc_type: DocType | str, profile: Profile | str, title: str,
             with_prompts: bool = False) -> tuple[Document, str | None]:
    doc = new_empty(doc_type, profile, title)
    sheet = authoring_sheet(doc.doc_type, doc.profile, doc.meta.title) if with_prompts else None
    return doc, sheet
