from django.urls import path
from . import views

urlpatterns = [
    path('', views.getRoutes),
    path('runs/', views.getRuns),
    path('runs/<int:pk>', views.getRun),
]
