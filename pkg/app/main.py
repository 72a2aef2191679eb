from fastapi import FastAPI

# Import routers and services
from app.log import configure_logging
from app.config import settings
from app.routes import runs, tokenize
from app.services.database import init_db

app = FastAPI(
    title="Katsuyo",
    description="Conjugation-aware tokenization of MeCab-analyzed Japanese for NMT.",
    version="1.0.0",
)


# Include routers
app.include_router(tokenize.router, prefix="", tags=["tokenize"])
app.include_router(runs.router, prefix="", tags=["runs"])


@app.get("/")
async def root():
    return {"message": "Welcome to the Katsuyo tokenization API. Check /docs for API documentation."}


@app.on_event("startup")
async def startup_db_client():
    configure_logging(settings.log_level)
    # Create the run ledger tables if they don't exist
    init_db()


if __name__ == "__main__":
    import uvicorn
    uvicorn.run(app, host="0.0.0.0", port=8000)
