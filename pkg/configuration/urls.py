"""
URL configuration for the quantale-lab project.

Chỉ phục vụ trang admin: xem các lần chạy kịch bản (ScenarioRun), log tác vụ (RunLog)
và lịch chạy định kỳ của django-celery-beat.
"""
from django.contrib import admin
from django.urls import path

admin.site.site_header = "Quantale Lab"
admin.site.site_title = "Quantale Lab"
admin.site.index_title = "Kết quả các kịch bản"

urlpatterns = [
    path('', admin.site.urls),
]
