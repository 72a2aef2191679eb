from fastapi import APIRouter, Depends, HTTPException, status

from app.config import scheme_for
from app.models.api import (
    DecodeRequest, DecodeResponse, EncodeRequest, EncodeResponse, InflectResponse,
)
from app.models.report import DecodeReport
from app.models.token import Scheme
from app.services.decode import decode_line
from app.services.encode import encode_sentence
from app.services.inflect import inflect_variants
from app.services.ingest import parse_corpus
from app.services.resources import Resources, get_resources

router = APIRouter()


@router.post("/encode", response_model=EncodeResponse)
async def encode(request: EncodeRequest, resources: Resources = Depends(get_resources)):
    """
    Encode MeCab output, one line per sentence.
    """
    try:
        scheme = scheme_for(request.scheme, request.placement)
        tag_map = resources.tag_map if request.ascii_tags else None
        lines = [encode_sentence(s, scheme, tag_map)
                 for s in parse_corpus(request.mecab.splitlines())]
    except ValueError as e:
        raise HTTPException(status_code=status.HTTP_400_BAD_REQUEST, detail=str(e))
    return EncodeResponse(scheme=scheme, lines=lines)


@router.post("/decode", response_model=DecodeResponse)
async def decode(request: DecodeRequest, resources: Resources = Depends(get_resources)):
    """
    Restore surfaces from token lines; the report counts every fallback taken.
    """
    try:
        scheme = scheme_for(request.scheme, request.placement)
    except ValueError as e:
        raise HTTPException(status_code=status.HTTP_400_BAD_REQUEST, detail=str(e))
    if scheme == Scheme.conj_feature:
        raise HTTPException(status_code=status.HTTP_400_BAD_REQUEST,
                            detail="conj-feature factors are source-side only")
    if scheme.is_token_scheme and resources.lexicon is None:
        raise HTTPException(status_code=status.HTTP_503_SERVICE_UNAVAILABLE,
                            detail="No lexicon loaded; set KATSUYO_LEXICON_PATH")

    tag_map = resources.tag_map if request.ascii_tags else None
    report = DecodeReport()
    sentences = []
    for line in request.lines:
        sentence, line_report = decode_line(line, scheme, resources.table, resources.lexicon,
                                            tag_map)
        sentences.append(sentence)
        report = report.merge(line_report)
    return DecodeResponse(scheme=scheme, sentences=sentences, report=report)


@router.get("/inflect", response_model=InflectResponse)
async def inflect(lemma: str, conj_type: str, conj_form: str,
                  resources: Resources = Depends(get_resources)):
    """
    Every surface of a lemma for an analyzer form key or a table cell name.
    """
    try:
        surfaces = inflect_variants(lemma, conj_type, conj_form, resources.table)
    except ValueError as e:
        raise HTTPException(status_code=status.HTTP_400_BAD_REQUEST, detail=str(e))
    return InflectResponse(lemma=lemma, conj_type=conj_type, conj_form=conj_form,
                           surfaces=surfaces)
